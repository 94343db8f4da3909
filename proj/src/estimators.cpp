#include "rbs/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "rbs/errors.hpp"
#include "rbs/sampler.hpp"

namespace rbs {

namespace {

double indicator_stderr(double p, std::uint64_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

}  // namespace

EstimateResult triangle_density(OracleSession& s, std::uint64_t trials) {
  if (trials < 1) throw std::invalid_argument("triangle_density: trials must be >= 1");
  if (s.graph().directed()) {
    throw std::invalid_argument("triangle_density requires an undirected graph");
  }
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const VertexId u = s.sample_vertex();
    const VertexId v = s.sample_vertex();
    const VertexId q = s.sample_vertex();
    const bool uv = s.is_adjacent(u, v);
    const bool uq = s.is_adjacent(u, q);
    const bool qv = s.is_adjacent(q, v);
    if (uv && uq && qv) ++hits;
  }
  EstimateResult r;
  r.trials = trials;
  r.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  r.queries = s.counts();
  r.stderr_estimate = indicator_stderr(r.estimate, trials);
  return r;
}

EstimateResult local_clustering(OracleSession& s, std::uint64_t trials,
                                std::uint32_t redraw_cap) {
  if (trials < 1) throw std::invalid_argument("local_clustering: trials must be >= 1");
  if (redraw_cap < 1) throw std::invalid_argument("local_clustering: redraw_cap must be >= 1");
  if (s.graph().directed()) {
    throw std::invalid_argument("local_clustering requires an undirected graph");
  }
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const VertexId v = s.sample_vertex();
    for (std::uint32_t attempt = 0; attempt < redraw_cap; ++attempt) {
      const auto u = s.sample_neighbor(v);
      const auto w = s.sample_neighbor(v);
      if (u && w && *u != *w) {
        if (s.is_adjacent(*u, *w)) ++hits;
        break;
      }
    }
  }
  EstimateResult r;
  r.trials = trials;
  r.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  r.queries = s.counts();
  r.stderr_estimate = indicator_stderr(r.estimate, trials);
  return r;
}

double canonical_estimate(OracleSession& s, const CanonicalEstimatorTable& table,
                          std::uint64_t canon_search_budget) {
  const auto& p = table.params;
  if (p.k < 1 || p.b < 1) {
    throw std::invalid_argument("canonical_estimate: invalid table params");
  }
  const BallUnion u = union_sample(s, p.k, p.b, p.radius);
  CanonOptions canon;
  canon.root_mode = p.root_mode;
  canon.feature_step = static_cast<double>(p.feature_step_micro) * 1e-6;
  canon.search_budget = canon_search_budget;
  const CanonicalCode code = canonicalize(u, canon);
  const auto it = table.entries.find(code);
  return it == table.entries.end() ? table.default_value : it->second;
}

ConnectivityDemoPoint connectivity_demo(std::uint32_t clique_size,
                                        std::uint32_t r_max, std::uint64_t samples,
                                        std::uint64_t seed,
                                        const ProfileOptions& opts) {
  ConnectivityDemoPoint point;
  point.clique_size = clique_size;
  const Graph bridged = gen_two_cliques(clique_size, true);
  const Graph unbridged = gen_two_cliques(clique_size, false);
  point.connectivity_bridged = weak_component_count(bridged) == 1 ? 1 : 0;
  point.connectivity_unbridged = weak_component_count(unbridged) == 1 ? 1 : 0;
  point.distance = sampling_distance(bridged, unbridged, r_max, samples, seed, opts);
  return point;
}

}  // namespace rbs
