#include "rbs/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "rbs/errors.hpp"
#include "rbs/rng.hpp"

namespace rbs {

namespace {

std::uint64_t pair_key(VertexId u, VertexId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

void require_undirected(const Graph& g, const char* op) {
  if (g.directed()) {
    throw std::invalid_argument(std::string(op) + " requires an undirected graph");
  }
}

}  // namespace

void GraphonSpec::validate() const {
  const std::size_t m = grid.size();
  if (m == 0) throw std::invalid_argument("graphon grid is empty");
  for (const auto& row : grid) {
    if (row.size() != m) throw std::invalid_argument("graphon grid is not square");
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("graphon entries must lie in [0,1]");
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (grid[i][j] != grid[j][i]) {
        throw std::invalid_argument("graphon grid must be symmetric");
      }
    }
  }
}

Graph Graph::from_edges(VertexId n,
                        std::span<const std::pair<VertexId, VertexId>> edges,
                        bool directed, EdgeListStats* stats) {
  EdgeListStats local;
  std::vector<std::pair<VertexId, VertexId>> arcs;
  arcs.reserve(edges.size() * (directed ? 1 : 2));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    const VertexId a = directed ? u : std::min(u, v);
    const VertexId b = directed ? v : std::max(u, v);
    if (!seen.insert(pair_key(a, b)).second) {
      ++local.duplicates_dropped;
      continue;
    }
    arcs.emplace_back(a, b);
    if (!directed) arcs.emplace_back(b, a);
  }
  if (stats) *stats = local;

  Graph g;
  g.n_ = n;
  g.directed_ = directed;
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (auto [u, v] : arcs) {
    ++g.out_offsets_[u + 1];
    ++g.in_offsets_[v + 1];
  }
  for (VertexId i = 0; i < n; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }
  g.out_targets_.resize(arcs.size());
  g.in_targets_.resize(arcs.size());
  std::vector<std::uint64_t> out_pos(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
  std::vector<std::uint64_t> in_pos(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (auto [u, v] : arcs) {
    g.out_targets_[out_pos[u]++] = v;
    g.in_targets_[in_pos[v]++] = u;
  }
  for (VertexId u = 0; u < n; ++u) {
    std::sort(g.out_targets_.begin() + g.out_offsets_[u],
              g.out_targets_.begin() + g.out_offsets_[u + 1]);
    std::sort(g.in_targets_.begin() + g.in_offsets_[u],
              g.in_targets_.begin() + g.in_offsets_[u + 1]);
  }

  if (n <= kDenseLimit && n > 0) {
    g.dense_words_ = (n + 63) / 64;
    g.dense_.assign(static_cast<std::size_t>(n) * g.dense_words_, 0);
    for (auto [u, v] : arcs) {
      g.dense_[static_cast<std::size_t>(u) * g.dense_words_ + v / 64] |=
          std::uint64_t{1} << (v % 64);
    }
  }
  return g;
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  if (u >= n_ || v >= n_) throw std::invalid_argument("has_edge: vertex out of range");
  if (u == v) return false;
  if (!dense_.empty()) {
    return (dense_[static_cast<std::size_t>(u) * dense_words_ + v / 64] >>
            (v % 64)) & 1;
  }
  const auto nbrs = out_neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

void Graph::set_features(std::vector<double> rows, std::uint32_t dim) {
  if (dim == 0) throw std::invalid_argument("feature dimension must be positive");
  if (rows.size() != static_cast<std::size_t>(n_) * dim) {
    throw std::invalid_argument("feature matrix has wrong number of rows");
  }
  for (double x : rows) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("feature entries must lie in [0,1]");
    }
  }
  features_ = std::move(rows);
  feature_dim_ = dim;
}

namespace {

std::vector<double> read_feature_file(const std::string& path, VertexId n,
                                      std::uint32_t* dim_out) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feature file: " + path);
  std::vector<double> rows;
  std::uint32_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  VertexId row_count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double x;
    while (ls >> x) row.push_back(x);
    if (row.empty()) continue;
    if (dim == 0) {
      dim = static_cast<std::uint32_t>(row.size());
    } else if (row.size() != dim) {
      throw ParseError("feature file line " + std::to_string(line_no) +
                       ": expected " + std::to_string(dim) + " values");
    }
    rows.insert(rows.end(), row.begin(), row.end());
    ++row_count;
  }
  if (row_count != n) {
    throw std::invalid_argument("feature row count " + std::to_string(row_count) +
                                " does not match vertex count " + std::to_string(n));
  }
  *dim_out = dim;
  return rows;
}

}  // namespace

LoadResult load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list: " + path);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::uint64_t u, v;
    if (!(ls >> u)) {
      if (ls.eof()) continue;  // blank line
      throw ParseError("edge list line " + std::to_string(line_no) + ": malformed");
    }
    if (!(ls >> v)) {
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": expected two vertex ids");
    }
    std::string trailing;
    if (ls >> trailing) {
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": trailing tokens");
    }
    raw.emplace_back(u, v);
    max_id = std::max({max_id, u, v});
  }

  // Compact arbitrary ids to a dense range in ascending order.
  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (auto [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<std::uint64_t, VertexId> remap;
  remap.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    remap[ids[i]] = static_cast<VertexId>(i);
  }

  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(raw.size());
  for (auto [u, v] : raw) edges.emplace_back(remap[u], remap[v]);

  LoadResult result;
  result.raw_id_max = max_id;
  result.graph = Graph::from_edges(static_cast<VertexId>(ids.size()), edges,
                                   directed, &result.stats);
  return result;
}

LoadResult load_edge_list(const std::string& path, bool directed,
                          const std::string& features_path) {
  LoadResult result = load_edge_list(path, directed);
  std::uint32_t dim = 0;
  auto rows = read_feature_file(features_path, result.graph.vertex_count(), &dim);
  result.graph.set_features(std::move(rows), dim);
  return result;
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v : g.out_neighbors(u)) {
      if (!g.directed() && v < u) continue;  // each undirected edge once
      out << u << ' ' << v << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Graph gen_er(VertexId n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  std::vector<std::pair<VertexId, VertexId>> edges;
  if (n >= 2 && p >= 1.0) {
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (VertexId i = 0; i < n; ++i)
      for (VertexId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  } else if (n >= 2 && p > 0.0) {
    // Geometric skipping over the linearized upper-triangular pair index.
    Rng rng(seed);
    const double log1mp = std::log1p(-p);
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::uint64_t idx = 0;
    VertexId row = 0;
    std::uint64_t row_start = 0;  // linear index of (row, row+1)
    while (true) {
      const double u = rng.next_double();
      const std::uint64_t skip =
          static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp));
      if (skip >= total - idx) break;
      idx += skip;
      while (idx - row_start >= static_cast<std::uint64_t>(n - 1 - row)) {
        row_start += n - 1 - row;
        ++row;
      }
      const VertexId col = row + 1 + static_cast<VertexId>(idx - row_start);
      edges.emplace_back(row, col);
      ++idx;
      if (idx >= total) break;
      while (idx - row_start >= static_cast<std::uint64_t>(n - 1 - row)) {
        row_start += n - 1 - row;
        ++row;
      }
    }
  }
  return Graph::from_edges(n, edges, /*directed=*/false);
}

Graph gen_config_regular(VertexId n, std::uint32_t d, std::uint64_t seed,
                         std::uint64_t* removed) {
  if (d >= n) throw std::invalid_argument("config model requires d < n");
  const std::uint64_t stubs_total = static_cast<std::uint64_t>(n) * d;
  if (stubs_total % 2 != 0) {
    throw std::invalid_argument("config model requires n*d even");
  }
  std::vector<VertexId> stubs;
  stubs.reserve(stubs_total);
  for (VertexId v = 0; v < n; ++v)
    for (std::uint32_t i = 0; i < d; ++i) stubs.push_back(v);
  Rng rng(seed);
  for (std::size_t i = stubs.size(); i > 1; --i) {
    std::swap(stubs[i - 1], stubs[rng.below(i)]);
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    edges.emplace_back(stubs[i], stubs[i + 1]);
  }
  EdgeListStats stats;
  Graph g = Graph::from_edges(n, edges, /*directed=*/false, &stats);
  if (removed) *removed = stats.self_loops_dropped + stats.duplicates_dropped;
  return g;
}

Graph gen_graphon(const GraphonSpec& spec, VertexId n, std::uint64_t seed,
                  bool record_latents) {
  spec.validate();
  Rng rng(seed);
  const std::size_t m = spec.resolution();
  std::vector<double> latent(n);
  std::vector<std::size_t> bucket(n);
  for (VertexId i = 0; i < n; ++i) {
    latent[i] = rng.next_double();
    bucket[i] = std::min(static_cast<std::size_t>(latent[i] * m), m - 1);
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      if (rng.next_double() < spec.grid[bucket[i]][bucket[j]]) {
        edges.emplace_back(i, j);
      }
    }
  }
  Graph g = Graph::from_edges(n, edges, /*directed=*/false);
  if (record_latents) g.set_features(std::move(latent), 1);
  return g;
}

Graph gen_two_cliques(VertexId clique_size, bool bridged) {
  if (clique_size < 2) throw std::invalid_argument("clique size must be >= 2");
  const VertexId N = clique_size;
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(static_cast<std::size_t>(N) * (N - 1) + 1);
  for (VertexId off : {VertexId{0}, N}) {
    for (VertexId i = 0; i < N; ++i)
      for (VertexId j = i + 1; j < N; ++j) edges.emplace_back(off + i, off + j);
  }
  if (bridged) edges.emplace_back(0, N);
  return Graph::from_edges(2 * N, edges, /*directed=*/false);
}

Graph add_random_edges(const Graph& g, std::uint64_t extra, std::uint64_t seed) {
  require_undirected(g, "add_random_edges");
  const VertexId n = g.vertex_count();
  const std::uint64_t capacity = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (g.edge_count() + extra > capacity) {
    throw std::invalid_argument("not enough non-edges to add");
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(g.edge_count() + extra);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v : g.out_neighbors(u)) {
      if (v > u) edges.emplace_back(u, v);
    }
  }
  std::unordered_set<std::uint64_t> added;
  Rng rng(seed);
  std::uint64_t placed = 0;
  while (placed < extra) {
    const VertexId u = static_cast<VertexId>(rng.below(n));
    const VertexId v = static_cast<VertexId>(rng.below(n));
    if (u == v || g.has_edge(u, v)) continue;
    const std::uint64_t key = pair_key(std::min(u, v), std::max(u, v));
    if (!added.insert(key).second) continue;
    edges.emplace_back(std::min(u, v), std::max(u, v));
    ++placed;
  }
  return Graph::from_edges(n, edges, /*directed=*/false);
}

namespace {

// Triangles via dense row intersection when available, sorted merge otherwise.
std::uint64_t triangle_count_impl(const Graph& g) {
  const VertexId n = g.vertex_count();
  std::uint64_t total = 0;
  for (VertexId u = 0; u < n; ++u) {
    const auto nu = g.out_neighbors(u);
    for (VertexId v : nu) {
      if (v <= u) continue;
      const auto nv = g.out_neighbors(v);
      // count w > v adjacent to both u and v
      auto iu = std::upper_bound(nu.begin(), nu.end(), v);
      auto iv = std::upper_bound(nv.begin(), nv.end(), v);
      while (iu != nu.end() && iv != nv.end()) {
        if (*iu < *iv) {
          ++iu;
        } else if (*iv < *iu) {
          ++iv;
        } else {
          ++total;
          ++iu;
          ++iv;
        }
      }
    }
  }
  return total;
}

}  // namespace

std::uint64_t exact_triangle_count(const Graph& g) {
  require_undirected(g, "exact_triangle_count");
  return triangle_count_impl(g);
}

double exact_triangle_statistic(const Graph& g) {
  require_undirected(g, "exact_triangle_statistic");
  const double n = static_cast<double>(g.vertex_count());
  if (g.vertex_count() == 0) return 0.0;
  return 6.0 * static_cast<double>(triangle_count_impl(g)) / (n * n * n);
}

double exact_local_clustering(const Graph& g) {
  require_undirected(g, "exact_local_clustering");
  const VertexId n = g.vertex_count();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (VertexId v = 0; v < n; ++v) {
    const auto nbrs = g.out_neighbors(v);
    const std::size_t deg = nbrs.size();
    if (deg < 2) continue;
    std::uint64_t closed = 0;
    for (std::size_t i = 0; i < deg; ++i) {
      for (std::size_t j = i + 1; j < deg; ++j) {
        if (g.has_edge(nbrs[i], nbrs[j])) ++closed;
      }
    }
    sum += 2.0 * static_cast<double>(closed) /
           (static_cast<double>(deg) * static_cast<double>(deg - 1));
  }
  return sum / static_cast<double>(n);
}

double exact_global_clustering(const Graph& g) {
  require_undirected(g, "exact_global_clustering");
  std::uint64_t wedges = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const std::uint64_t deg = g.out_degree(v);
    wedges += deg * (deg - 1) / 2;
  }
  if (wedges == 0) return 0.0;
  return 3.0 * static_cast<double>(triangle_count_impl(g)) /
         static_cast<double>(wedges);
}

std::uint32_t exact_max_degree(const Graph& g) {
  require_undirected(g, "exact_max_degree");
  std::uint32_t best = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    best = std::max(best, g.out_degree(v));
  }
  return best;
}

std::uint32_t weak_component_count(const Graph& g) {
  const VertexId n = g.vertex_count();
  std::vector<bool> seen(n, false);
  std::vector<VertexId> stack;
  std::uint32_t components = 0;
  for (VertexId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const VertexId u = stack.back();
      stack.pop_back();
      for (auto nbrs : {g.out_neighbors(u), g.in_neighbors(u)}) {
        for (VertexId v : nbrs) {
          if (!seen[v]) {
            seen[v] = true;
            stack.push_back(v);
          }
        }
      }
    }
  }
  return components;
}

}  // namespace rbs
