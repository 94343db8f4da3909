#pragma once

// Shared test helpers: brute-force oracles kept independent of the library
// code paths they validate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "rbs/canonical.hpp"
#include "rbs/graph.hpp"

namespace rbs::test {

inline SmallGraphView make_view(std::uint32_t m,
                                const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                bool directed = false,
                                std::vector<std::uint32_t> roots = {},
                                std::vector<double> features = {},
                                std::uint32_t feature_dim = 0) {
  SmallGraphView v;
  v.m = m;
  v.adjacency.assign(static_cast<std::size_t>(m) * m, 0);
  for (auto [a, b] : edges) {
    v.adjacency[static_cast<std::size_t>(a) * m + b] = 1;
    if (!directed) v.adjacency[static_cast<std::size_t>(b) * m + a] = 1;
  }
  v.roots = std::move(roots);
  v.features = std::move(features);
  v.feature_dim = feature_dim;
  return v;
}

inline std::uint32_t quantize_step(double x, double step) {
  const auto top = static_cast<std::uint32_t>(1.0 / step);
  return std::min(static_cast<std::uint32_t>(std::floor(x / step)), top);
}

// Exhaustive isomorphism test over all m! bijections; ordered roots must map
// index-to-index and quantized feature rows must match.
inline bool brute_force_isomorphic(const SmallGraphView& a, const SmallGraphView& b,
                                   bool respect_roots, double feature_step = 0.1) {
  if (a.m != b.m || a.feature_dim != b.feature_dim) return false;
  if (respect_roots && a.roots.size() != b.roots.size()) return false;
  const std::uint32_t m = a.m;
  std::vector<std::uint32_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  auto adj = [m](const SmallGraphView& g, std::uint32_t i, std::uint32_t j) {
    return g.adjacency[static_cast<std::size_t>(i) * m + j] != 0;
  };
  do {
    bool ok = true;
    if (respect_roots) {
      for (std::size_t r = 0; ok && r < a.roots.size(); ++r) {
        if (perm[a.roots[r]] != b.roots[r]) ok = false;
      }
    }
    for (std::uint32_t i = 0; ok && i < m; ++i) {
      for (std::uint32_t d = 0; ok && d < a.feature_dim; ++d) {
        const double fa = a.features[static_cast<std::size_t>(i) * a.feature_dim + d];
        const double fb = b.features[static_cast<std::size_t>(perm[i]) * a.feature_dim + d];
        if (quantize_step(fa, feature_step) != quantize_step(fb, feature_step)) ok = false;
      }
      for (std::uint32_t j = 0; ok && j < m; ++j) {
        if (adj(a, i, j) != adj(b, perm[i], perm[j])) ok = false;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// All labeled undirected graphs on m vertices, one per edge-subset bitmask.
inline void for_each_labeled_undirected(std::uint32_t m,
                                        const std::function<void(const SmallGraphView&)>& fn) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  const std::uint64_t total = std::uint64_t{1} << pairs.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if ((mask >> e) & 1) edges.push_back(pairs[e]);
    }
    fn(make_view(m, edges));
  }
}

inline void for_each_labeled_directed(std::uint32_t m,
                                      const std::function<void(const SmallGraphView&)>& fn) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < m; ++j)
      if (i != j) arcs.emplace_back(i, j);
  const std::uint64_t total = std::uint64_t{1} << arcs.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t e = 0; e < arcs.size(); ++e) {
      if ((mask >> e) & 1) edges.push_back(arcs[e]);
    }
    fn(make_view(m, edges, /*directed=*/true));
  }
}

// Upper-tail chi-square critical values at significance 0.001.
inline double chi_square_crit_001(std::uint32_t df) {
  switch (df) {
    case 1: return 10.828;
    case 3: return 16.266;
    case 7: return 24.322;
    case 15: return 37.697;
    default: break;
  }
  // Wilson-Hilferty approximation for other df.
  const double z = 3.0902;  // 99.9th percentile of the standard normal
  const double d = static_cast<double>(df);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

inline std::vector<std::reference_wrapper<const Graph>> graph_refs(
    const std::vector<Graph>& graphs) {
  std::vector<std::reference_wrapper<const Graph>> refs;
  refs.reserve(graphs.size());
  for (const Graph& g : graphs) refs.emplace_back(g);
  return refs;
}

}  // namespace rbs::test
