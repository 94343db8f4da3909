#include "rbs/sampler.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "rbs/errors.hpp"

namespace rbs {

namespace {

struct Ball {
  VertexId root;
  std::vector<std::vector<VertexId>> layers;
};

Ball expand_ball(OracleSession& s, VertexId root, std::uint32_t b, std::uint32_t r) {
  Ball ball;
  ball.root = root;
  ball.layers.assign(r + 1, {});
  ball.layers[0].push_back(root);
  for (std::uint32_t i = 1; i <= r; ++i) {
    for (VertexId u : ball.layers[i - 1]) {
      for (std::uint32_t t = 0; t < b; ++t) {
        if (auto v = s.sample_neighbor(u)) {
          ball.layers[i].push_back(*v);
        }
      }
    }
  }
  return ball;
}

BallUnion assemble(OracleSession& s, std::vector<Ball> balls, BallParams params,
                   bool rooted) {
  BallUnion u;
  u.params = params;
  std::unordered_map<VertexId, std::uint32_t> local;
  for (Ball& ball : balls) {
    u.roots.push_back(ball.root);
    for (auto& layer : ball.layers) {
      for (VertexId v : layer) {
        if (local.emplace(v, static_cast<std::uint32_t>(u.vertices.size())).second) {
          u.vertices.push_back(v);
        }
      }
    }
    u.layers.push_back(std::move(ball.layers));
  }
  if (rooted) u.designated_root = local.at(u.roots.front());

  const std::uint32_t m = u.size();
  u.adjacency.assign(static_cast<std::size_t>(m) * m, 0);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      if (i == j) continue;
      u.adjacency[static_cast<std::size_t>(i) * m + j] =
          s.is_adjacent(u.vertices[i], u.vertices[j]) ? 1 : 0;
    }
  }

  const Graph& g = s.graph();
  if (g.has_features()) {
    u.feature_dim = g.feature_dim();
    u.features.reserve(static_cast<std::size_t>(m) * u.feature_dim);
    for (VertexId v : u.vertices) {
      const auto row = g.feature_row(v);
      u.features.insert(u.features.end(), row.begin(), row.end());
    }
  }
  return u;
}

}  // namespace

std::uint64_t ball_union_vertex_bound(std::uint32_t k, std::uint32_t b,
                                      std::uint32_t r) {
  std::uint64_t per_ball = 1;
  std::uint64_t level = 1;
  for (std::uint32_t i = 1; i <= r; ++i) {
    level *= b;
    per_ball += level;
  }
  return static_cast<std::uint64_t>(k) * per_ball;
}

BallUnion union_sample(OracleSession& s, std::uint32_t k, std::uint32_t b,
                       std::uint32_t r) {
  if (k < 1 || b < 1) throw std::invalid_argument("union_sample: k and b must be >= 1");
  if (s.graph().vertex_count() == 0) {
    throw InvalidStateError("union_sample on empty graph");
  }
  const std::uint64_t epoch = s.draw_epoch();
  std::vector<Ball> balls;
  balls.reserve(k);
  for (std::uint32_t i = 1; i <= k; ++i) {
    OracleSession child = s.subsession(epoch, i);
    const VertexId root = child.sample_vertex();
    balls.push_back(expand_ball(child, root, b, r));
  }
  return assemble(s, std::move(balls), BallParams{k, b, r}, /*rooted=*/false);
}

BallUnion random_ball_sample(OracleSession& s, std::uint32_t b, std::uint32_t r) {
  return union_sample(s, 1, b, r);
}

BallUnion rooted_union_sample(OracleSession& s, VertexId root,
                              std::uint32_t extra_balls, std::uint32_t b,
                              std::uint32_t r) {
  if (b < 1) throw std::invalid_argument("rooted_union_sample: b must be >= 1");
  if (root >= s.graph().vertex_count()) {
    throw std::invalid_argument("rooted_union_sample: invalid root");
  }
  const std::uint64_t epoch = s.draw_epoch();
  std::vector<Ball> balls;
  balls.reserve(extra_balls + 1);
  {
    OracleSession child = s.subsession(epoch, 0);
    balls.push_back(expand_ball(child, root, b, r));
  }
  for (std::uint32_t i = 1; i <= extra_balls; ++i) {
    OracleSession child = s.subsession(epoch, i);
    const VertexId ball_root = child.sample_vertex();
    balls.push_back(expand_ball(child, ball_root, b, r));
  }
  return assemble(s, std::move(balls), BallParams{extra_balls + 1, b, r},
                  /*rooted=*/true);
}

ComponentSet weakly_connected_components(const BallUnion& u) {
  const std::uint32_t m = u.size();
  std::vector<std::uint32_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = i + 1; j < m; ++j) {
      if (u.edge(i, j) || u.edge(j, i)) unite(i, j);
    }
  }

  ComponentSet cs;
  std::unordered_map<std::uint32_t, std::size_t> index_of_root;
  for (std::uint32_t v = 0; v < m; ++v) {
    const std::uint32_t root = find(v);
    auto [it, fresh] = index_of_root.emplace(root, cs.components.size());
    if (fresh) cs.components.emplace_back();
    cs.components[it->second].push_back(v);
  }
  // Scanning local indices ascending already orders components by smallest
  // contained index and sorts each component.
  if (u.designated_root) {
    cs.root_component = index_of_root.at(find(*u.designated_root));
  }
  return cs;
}

}  // namespace rbs
