#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rbs/sampler.hpp"

namespace rbs {

enum class RootMode : std::uint8_t { Unrooted = 0, Ordered = 1 };

struct CanonOptions {
  RootMode root_mode = RootMode::Ordered;
  // Feature quantization step; buckets realize a grid net on [0,1]^d.
  double feature_step = 0.1;
  std::uint32_t size_cap = 256;
  // Individualization-refinement node budget; exceeding it raises
  // CanonSearchBudgetError, never a wrong answer.
  std::uint64_t search_budget = 1u << 20;
};

// Exact isomorphism-class certificate of a small k-rooted, optionally
// vertex-featured directed graph. Two inputs get equal certificates iff they
// are k-rooted-isomorphic with quantized features; the byte encoding is
// versioned and endianness-fixed so certificates persist across machines.
struct CanonicalCode {
  std::vector<std::uint8_t> certificate;
  std::array<std::uint64_t, 2> digest{};

  RootMode root_mode() const;
  std::uint32_t vertex_count() const;
  std::uint32_t feature_step_micro() const;

  bool operator==(const CanonicalCode& o) const { return certificate == o.certificate; }
  bool operator<(const CanonicalCode& o) const { return certificate < o.certificate; }
};

// Hash for certificate maps: the digest keys buckets, full certificate
// equality resolves digest collisions.
struct CodeHash {
  std::size_t operator()(const CanonicalCode& c) const {
    return static_cast<std::size_t>(c.digest[0]);
  }
};

// Raw canonicalization input: adjacency over local indices [0, m), ordered
// root list (may repeat; ignored in unrooted mode) and optional features.
struct SmallGraphView {
  std::uint32_t m = 0;
  std::vector<std::uint8_t> adjacency;  // m*m row-major, false diagonal
  std::vector<std::uint32_t> roots;     // local indices
  std::vector<double> features;         // m x feature_dim
  std::uint32_t feature_dim = 0;
};

// Canonical form by color refinement to a stable partition, then
// individualization-refinement choosing the lexicographically smallest
// certificate. Initial colors combine root positions and quantized feature
// buckets.
CanonicalCode canonicalize(const SmallGraphView& g, const CanonOptions& opts = {});

CanonicalCode canonicalize(const BallUnion& u, const CanonOptions& opts = {});

// Certificate of one weakly connected component of a ball union. Roots
// falling inside the component are kept (in order) when opts request them.
CanonicalCode canonicalize_component(const BallUnion& u, const ComponentSet& cs,
                                     std::size_t component,
                                     const CanonOptions& opts = {});

// Certificate equality; throws std::invalid_argument when the codes were
// built with different root modes or quantization steps.
bool isomorphic(const CanonicalCode& a, const CanonicalCode& b);

std::array<std::uint64_t, 2> hash128(const std::uint8_t* data, std::size_t len);

}  // namespace rbs
