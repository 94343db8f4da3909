#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "rbs/graph.hpp"
#include "rbs/rng.hpp"

namespace rbs {

struct QueryCounts {
  std::uint64_t sample_vertex = 0;
  std::uint64_t sample_neighbor = 0;
  std::uint64_t is_adjacent = 0;

  std::uint64_t total() const { return sample_vertex + sample_neighbor + is_adjacent; }

  bool operator==(const QueryCounts&) const = default;
};

// The random neighborhood computational model: the only access path the
// sampler and estimators may use. Three queries, each charged exactly once
// per call against the shared counters (and optional budget):
//   sample_vertex()        uniform vertex
//   sample_neighbor(u)     uniform out-neighbor of u, empty if u has none
//   is_adjacent(u, v)      directed arc test; (u,u) is always false
//
// A session is single-owner. Parallel or nested work derives subsessions
// (draw_epoch + subsession) that share the counters and budget but own an
// independent random substream; ball i of a union always gets tag i, so
// seed-matched runs stay aligned.
class OracleSession {
 public:
  OracleSession(const Graph& g, std::uint64_t seed)
      : OracleSession(g, seed, std::nullopt) {}
  OracleSession(const Graph& g, std::uint64_t seed, std::optional<std::uint64_t> budget)
      : graph_(&g),
        rng_(seed),
        counts_(std::make_shared<QueryCounts>()),
        budget_(budget) {}

  VertexId sample_vertex();
  std::optional<VertexId> sample_neighbor(VertexId u);
  bool is_adjacent(VertexId u, VertexId v);

  const QueryCounts& counts() const { return *counts_; }
  std::optional<std::uint64_t> budget() const { return budget_; }
  const Graph& graph() const { return *graph_; }

  // Advances the session stream by one draw; not an oracle query.
  std::uint64_t draw_epoch() { return rng_.next_u64(); }

  // Child session with substream derive(epoch, tag), sharing counts/budget.
  OracleSession subsession(std::uint64_t epoch, std::uint32_t tag) const {
    return OracleSession(graph_, Rng(Rng::derive(epoch, tag)), counts_, budget_);
  }

 private:
  OracleSession(const Graph* g, Rng rng, std::shared_ptr<QueryCounts> counts,
                std::optional<std::uint64_t> budget)
      : graph_(g), rng_(rng), counts_(std::move(counts)), budget_(budget) {}

  void charge(std::uint64_t QueryCounts::* field);

  const Graph* graph_;
  Rng rng_;
  std::shared_ptr<QueryCounts> counts_;
  std::optional<std::uint64_t> budget_;
};

}  // namespace rbs
