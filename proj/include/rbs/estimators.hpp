#pragma once

#include <cstdint>
#include <unordered_map>

#include "rbs/canonical.hpp"
#include "rbs/metric.hpp"
#include "rbs/oracle.hpp"

namespace rbs {

struct EstimateResult {
  double estimate = 0.0;
  std::uint64_t trials = 0;
  QueryCounts queries;
  double stderr_estimate = 0.0;  // sqrt(p(1-p)/T) for indicator means
};

// Triangle-trial estimator: each trial samples three vertices with
// replacement and issues all three adjacency tests (no short-circuit, so
// query counts are exactly 3T sample_vertex + 3T is_adjacent). Estimates
// 6 * (#triangles) / n^3.
EstimateResult triangle_density(OracleSession& s, std::uint64_t trials);

// Local clustering estimator. Per trial: sample a vertex v, then draw
// neighbor pairs (two sample_neighbor calls per attempt, up to redraw_cap
// attempts) until the pair is distinct and non-empty; the trial contributes
// is_adjacent(u, w), or 0 when no distinct pair was obtained (degree < 2
// convention).
EstimateResult local_clustering(OracleSession& s, std::uint64_t trials,
                                std::uint32_t redraw_cap = 16);

// Canonical estimator: output depends only on the isomorphism class of the
// sampled union. Unknown classes map to default_value.
struct CanonicalEstimatorTable {
  ProfileParams params;
  std::unordered_map<CanonicalCode, double, CodeHash> entries;
  double default_value = 0.0;
};

double canonical_estimate(OracleSession& s, const CanonicalEstimatorTable& table,
                          std::uint64_t canon_search_budget = 1u << 20);

// The connectivity non-estimability gadget: bridged vs unbridged two-clique
// pair. Connectivity differs by exactly 1 for every N while the empirical
// sampling distance shrinks as N grows.
struct ConnectivityDemoPoint {
  std::uint32_t clique_size = 0;
  int connectivity_bridged = 1;
  int connectivity_unbridged = 0;
  DistanceEstimate distance;
};

ConnectivityDemoPoint connectivity_demo(std::uint32_t clique_size,
                                        std::uint32_t r_max, std::uint64_t samples,
                                        std::uint64_t seed,
                                        const ProfileOptions& opts = {});

}  // namespace rbs
