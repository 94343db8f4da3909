#include "rbs/oracle.hpp"

#include <stdexcept>

#include "rbs/errors.hpp"

namespace rbs {

void OracleSession::charge(std::uint64_t QueryCounts::* field) {
  if (budget_ && counts_->total() >= *budget_) {
    throw BudgetExceededError("oracle query budget exhausted");
  }
  ++(counts_.get()->*field);
}

VertexId OracleSession::sample_vertex() {
  if (graph_->vertex_count() == 0) {
    throw InvalidStateError("sample_vertex on empty graph");
  }
  charge(&QueryCounts::sample_vertex);
  return static_cast<VertexId>(rng_.below(graph_->vertex_count()));
}

std::optional<VertexId> OracleSession::sample_neighbor(VertexId u) {
  if (u >= graph_->vertex_count()) {
    throw std::invalid_argument("sample_neighbor: vertex out of range");
  }
  charge(&QueryCounts::sample_neighbor);
  const auto nbrs = graph_->out_neighbors(u);
  if (nbrs.empty()) return std::nullopt;
  return nbrs[rng_.below(nbrs.size())];
}

bool OracleSession::is_adjacent(VertexId u, VertexId v) {
  if (u >= graph_->vertex_count() || v >= graph_->vertex_count()) {
    throw std::invalid_argument("is_adjacent: vertex out of range");
  }
  charge(&QueryCounts::is_adjacent);
  return graph_->has_edge(u, v);
}

}  // namespace rbs
