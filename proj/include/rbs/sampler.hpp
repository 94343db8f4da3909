#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rbs/oracle.hpp"

namespace rbs {

struct BallParams {
  std::uint32_t k = 1;  // number of balls
  std::uint32_t b = 1;  // branching factor
  std::uint32_t r = 0;  // radius
};

// Union of k sampled balls: ordered roots, deduplicated vertex set with a
// local reindexing [0, m), the induced adjacency identified via is_adjacent,
// per-ball layer lists (duplicates kept, as sampled), and features copied
// from the host graph. Immutable after construction.
struct BallUnion {
  std::vector<VertexId> roots;     // original ids, ordered
  std::vector<VertexId> vertices;  // original ids; position = local index
  // layers[ball][level] -> original ids, with duplicates
  std::vector<std::vector<std::vector<VertexId>>> layers;
  std::vector<std::uint8_t> adjacency;  // m*m row-major, false diagonal
  std::vector<double> features;         // m x feature_dim, row-major
  std::uint32_t feature_dim = 0;
  BallParams params;
  std::optional<std::uint32_t> designated_root;  // local index (rooted variant)

  std::uint32_t size() const { return static_cast<std::uint32_t>(vertices.size()); }
  bool edge(std::uint32_t i, std::uint32_t j) const {
    return adjacency[static_cast<std::size_t>(i) * vertices.size() + j] != 0;
  }
};

// Geometric bound on the union's vertex count: k*(b^(r+1)-1)/(b-1).
std::uint64_t ball_union_vertex_bound(std::uint32_t k, std::uint32_t b, std::uint32_t r);

// One random ball (Algorithm 1): layer[0] is a uniform vertex; every entry
// of layer[i-1] (duplicates expanded separately) gets b independent
// neighbor draws appended to layer[i], empty draws skipped.
BallUnion random_ball_sample(OracleSession& s, std::uint32_t b, std::uint32_t r);

// k independent balls merged; the induced adjacency is identified over the
// merged vertex set with is_adjacent on every ordered pair of distinct
// sampled vertices (m*(m-1) queries, no shortcuts).
BallUnion union_sample(OracleSession& s, std::uint32_t k, std::uint32_t b,
                       std::uint32_t r);

// Rooted variant: ball 0 is centered at `root` (no vertex query), plus
// `extra_balls` balls sampled as in union_sample. Ball i >= 1 uses the same
// substream tag as ball i of union_sample, so seed-matched runs draw the
// same extra roots.
BallUnion rooted_union_sample(OracleSession& s, VertexId root,
                              std::uint32_t extra_balls, std::uint32_t b,
                              std::uint32_t r);

// Partition of [0, m) into weakly connected components of the induced
// adjacency, each sorted ascending, ordered by smallest contained index.
struct ComponentSet {
  std::vector<std::vector<std::uint32_t>> components;
  std::optional<std::size_t> root_component;
};

ComponentSet weakly_connected_components(const BallUnion& u);

}  // namespace rbs
