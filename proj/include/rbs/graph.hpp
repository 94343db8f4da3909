#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rbs {

using VertexId = std::uint32_t;

// Piecewise-constant graphon: an m x m grid of edge probabilities.
// Symmetric with entries in [0,1]; a 1x1 grid is Erdos-Renyi, a block
// grid is a stochastic block model.
struct GraphonSpec {
  std::vector<std::vector<double>> grid;

  std::size_t resolution() const { return grid.size(); }
  void validate() const;  // throws std::invalid_argument
};

struct EdgeListStats {
  std::uint64_t self_loops_dropped = 0;
  std::uint64_t duplicates_dropped = 0;
};

// Immutable graph in CSR form. Undirected graphs are stored as symmetric
// digraphs so a single adjacency code path serves both. No self-loops, no
// duplicate edges. Optional vertex features live in [0,1]^d.
class Graph {
 public:
  Graph() = default;

  // Builds from an edge list over vertices [0, n). Self-loops and duplicate
  // edges are dropped (counted in `stats` if given); undirected input is
  // symmetrized.
  static Graph from_edges(VertexId n,
                          std::span<const std::pair<VertexId, VertexId>> edges,
                          bool directed, EdgeListStats* stats = nullptr);

  VertexId vertex_count() const { return n_; }
  bool directed() const { return directed_; }

  // Number of arcs for directed graphs, unordered edges for undirected.
  std::uint64_t edge_count() const {
    return directed_ ? out_targets_.size() : out_targets_.size() / 2;
  }

  std::span<const VertexId> out_neighbors(VertexId u) const {
    return {out_targets_.data() + out_offsets_[u],
            out_targets_.data() + out_offsets_[u + 1]};
  }
  std::span<const VertexId> in_neighbors(VertexId u) const {
    return {in_targets_.data() + in_offsets_[u],
            in_targets_.data() + in_offsets_[u + 1]};
  }
  VertexId out_degree(VertexId u) const {
    return static_cast<VertexId>(out_offsets_[u + 1] - out_offsets_[u]);
  }
  VertexId in_degree(VertexId u) const {
    return static_cast<VertexId>(in_offsets_[u + 1] - in_offsets_[u]);
  }

  // Directed arc test; (u,u) is always false. O(1) via a dense bitmap for
  // small graphs, binary search otherwise.
  bool has_edge(VertexId u, VertexId v) const;

  bool has_features() const { return feature_dim_ > 0; }
  std::uint32_t feature_dim() const { return feature_dim_; }
  std::span<const double> feature_row(VertexId u) const {
    return {features_.data() + static_cast<std::size_t>(u) * feature_dim_,
            feature_dim_};
  }
  // Row-major n x d matrix; entries must lie in [0,1].
  void set_features(std::vector<double> rows, std::uint32_t dim);

 private:
  VertexId n_ = 0;
  bool directed_ = false;
  std::vector<std::uint64_t> out_offsets_{0};
  std::vector<VertexId> out_targets_;
  std::vector<std::uint64_t> in_offsets_{0};
  std::vector<VertexId> in_targets_;
  std::vector<double> features_;
  std::uint32_t feature_dim_ = 0;

  // Dense adjacency rows, built when n <= kDenseLimit.
  static constexpr VertexId kDenseLimit = 4096;
  std::vector<std::uint64_t> dense_;
  std::size_t dense_words_ = 0;
};

struct LoadResult {
  Graph graph;
  EdgeListStats stats;
  std::uint64_t raw_id_max = 0;
};

// Whitespace-separated "u v" pairs, '#' starts a comment line. Vertex ids
// are arbitrary non-negative integers and get compacted to [0, n) in
// ascending order.
LoadResult load_edge_list(const std::string& path, bool directed);
LoadResult load_edge_list(const std::string& path, bool directed,
                          const std::string& features_path);
void write_edge_list(const Graph& g, const std::string& path);

// --- generators (bitwise reproducible for a fixed seed) ---

Graph gen_er(VertexId n, double p, std::uint64_t seed);

// Configuration model: n vertices with d half-edges, paired uniformly.
// Self-loops and parallel edges from the pairing are deleted, leaving a
// near-d-regular simple graph; `removed` reports how many pairings were
// dropped. Requires n*d even and d < n.
Graph gen_config_regular(VertexId n, std::uint32_t d, std::uint64_t seed,
                         std::uint64_t* removed = nullptr);

// Draws x_1..x_n uniform in [0,1]; edge (i,j) with probability
// grid[bucket(x_i)][bucket(x_j)]. With record_latents the latent positions
// are attached as a 1-dimensional feature column.
Graph gen_graphon(const GraphonSpec& spec, VertexId n, std::uint64_t seed,
                  bool record_latents = false);

// Two disjoint K_N, plus one bridging edge if `bridged`.
Graph gen_two_cliques(VertexId clique_size, bool bridged);

// Adds `extra` new edges uniformly at random (rejection sampling: no
// self-loops, no duplicates of existing or new edges). Undirected only.
Graph add_random_edges(const Graph& g, std::uint64_t extra, std::uint64_t seed);

// --- exact brute-force oracles (undirected input required) ---

std::uint64_t exact_triangle_count(const Graph& g);

// Expectation of the triangle-trial indicator over ordered vertex triples
// sampled with replacement: 6 * (#triangles) / n^3.
double exact_triangle_statistic(const Graph& g);

// Average of per-vertex clustering; vertices of degree < 2 contribute 0.
double exact_local_clustering(const Graph& g);

// Transitivity: 3 * (#triangles) / (#wedges); 0 when there are no wedges.
double exact_global_clustering(const Graph& g);

std::uint32_t exact_max_degree(const Graph& g);

std::uint32_t weak_component_count(const Graph& g);

}  // namespace rbs
