#include "rbs/graph.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <doctest.h>

#include "rbs/errors.hpp"
#include "rbs/rng.hpp"
#include "test_util.hpp"

using namespace rbs;

namespace {

std::string write_temp(const std::string& name, const std::string& contents) {
  std::string path = "tmp_" + name;
  std::ofstream out(path);
  out << contents;
  return path;
}

Graph from_pairs(VertexId n, std::vector<std::pair<VertexId, VertexId>> edges,
                 bool directed = false) {
  return Graph::from_edges(n, edges, directed);
}

// Independent triangle count: test all C(n,3) vertex triples directly.
std::uint64_t triple_scan_triangles(const Graph& g) {
  std::uint64_t count = 0;
  const VertexId n = g.vertex_count();
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b)
      for (VertexId c = b + 1; c < n; ++c)
        if (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) ++count;
  return count;
}

}  // namespace

TEST_CASE("load_edge_list basic parsing") {
  const auto path = write_temp("basic.el", "0 1\n1 2\n");
  const auto result = load_edge_list(path, false);
  CHECK(result.graph.vertex_count() == 3);
  CHECK(result.graph.edge_count() == 2);
  CHECK(result.stats.self_loops_dropped == 0);
  std::remove(path.c_str());
}

TEST_CASE("load_edge_list drops self-loops with a count") {
  const auto path = write_temp("loop.el", "0 0\n");
  const auto result = load_edge_list(path, false);
  CHECK(result.graph.vertex_count() == 1);
  CHECK(result.graph.edge_count() == 0);
  CHECK(result.stats.self_loops_dropped == 1);
  std::remove(path.c_str());
}

TEST_CASE("load_edge_list compacts sparse ids") {
  const auto path = write_temp("sparse.el", "5 9\n");
  const auto result = load_edge_list(path, false);
  CHECK(result.graph.vertex_count() == 2);
  CHECK(result.graph.has_edge(0, 1));
  std::remove(path.c_str());
}

TEST_CASE("load_edge_list reports malformed line numbers") {
  const auto path = write_temp("bad.el", "0 1\nbroken\n");
  CHECK_THROWS_WITH_AS(load_edge_list(path, false),
                       doctest::Contains("line 2"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("load_edge_list with comments, duplicates, and features") {
  const auto path = write_temp("full.el", "# header\n0 1\n1 0\n1 2\n");
  const auto plain = load_edge_list(path, false);
  CHECK(plain.graph.edge_count() == 2);
  CHECK(plain.stats.duplicates_dropped == 1);

  const auto feat = write_temp("full.feat", "0.1 0.5\n0.2 0.9\n1.0 0.0\n");
  const auto result = load_edge_list(path, false, feat);
  CHECK(result.graph.feature_dim() == 2);
  CHECK(result.graph.feature_row(2)[0] == 1.0);

  const auto short_feat = write_temp("short.feat", "0.1\n0.2\n");
  CHECK_THROWS_AS(load_edge_list(path, false, short_feat), std::invalid_argument);
  std::remove(path.c_str());
  std::remove(feat.c_str());
  std::remove(short_feat.c_str());
}

TEST_CASE("edge list round-trip") {
  const Graph g = gen_er(40, 0.2, 99);
  const auto path = write_temp("round.el", "");
  write_edge_list(g, path);
  const auto reloaded = load_edge_list(path, false);
  // Isolated vertices cannot appear in an edge list; this seed has none.
  REQUIRE(reloaded.graph.vertex_count() == g.vertex_count());
  CHECK(reloaded.graph.edge_count() == g.edge_count());
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      CHECK(reloaded.graph.has_edge(u, v) == g.has_edge(u, v));
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("gen_er boundary cases") {
  const Graph empty = gen_er(10, 0.0, 1);
  CHECK(empty.vertex_count() == 10);
  CHECK(empty.edge_count() == 0);

  const Graph complete = gen_er(10, 1.0, 1);
  CHECK(complete.edge_count() == 45);

  CHECK_THROWS_AS(gen_er(10, 1.5, 1), std::invalid_argument);
}

TEST_CASE("gen_er mean degree concentration") {
  const Graph g = gen_er(1000, 0.01, 7);
  const double mean_degree =
      2.0 * static_cast<double>(g.edge_count()) / g.vertex_count();
  CHECK(mean_degree >= 8.0);
  CHECK(mean_degree <= 12.0);
}

TEST_CASE("generators are reproducible per seed") {
  for (int variant = 0; variant < 3; ++variant) {
    Graph a, b;
    if (variant == 0) {
      a = gen_er(200, 0.03, 5);
      b = gen_er(200, 0.03, 5);
    } else if (variant == 1) {
      a = gen_config_regular(100, 3, 5);
      b = gen_config_regular(100, 3, 5);
    } else {
      GraphonSpec spec{{{0.4, 0.1}, {0.1, 0.4}}};
      a = gen_graphon(spec, 100, 5);
      b = gen_graphon(spec, 100, 5);
    }
    REQUIRE(a.vertex_count() == b.vertex_count());
    REQUIRE(a.edge_count() == b.edge_count());
    for (VertexId u = 0; u < a.vertex_count(); ++u) {
      for (VertexId v = 0; v < a.vertex_count(); ++v) {
        CHECK(a.has_edge(u, v) == b.has_edge(u, v));
      }
    }
  }
  const Graph c = gen_er(200, 0.03, 6);
  CHECK(c.edge_count() != gen_er(200, 0.03, 5).edge_count());
}

TEST_CASE("gen_config_regular properties") {
  const Graph small = gen_config_regular(4, 2, 3);
  for (VertexId v = 0; v < 4; ++v) CHECK(small.out_degree(v) <= 2);

  std::uint64_t removed = 0;
  const Graph g = gen_config_regular(1000, 3, 11, &removed);
  std::uint32_t exact = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.out_degree(v) == 3) ++exact;
  }
  CHECK(exact >= 990);  // O(1) expected removals
  CHECK(removed <= 10);

  CHECK_THROWS_AS(gen_config_regular(3, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_config_regular(5, 3, 1), std::invalid_argument);  // odd n*d
}

TEST_CASE("gen_graphon block structure") {
  GraphonSpec diag{{{0.5, 0.0}, {0.0, 0.5}}};
  const Graph g = gen_graphon(diag, 400, 21, /*record_latents=*/true);
  // No cross-block edges: verify against the recorded latent positions.
  std::uint64_t cross = 0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v : g.out_neighbors(u)) {
      if ((g.feature_row(u)[0] < 0.5) != (g.feature_row(v)[0] < 0.5)) ++cross;
    }
  }
  CHECK(cross == 0);
  // Two dense halves, each connected with overwhelming probability.
  CHECK(weak_component_count(g) == 2);
}

TEST_CASE("gen_graphon cross-block edge fraction") {
  GraphonSpec spec{{{0.3, 0.05}, {0.05, 0.3}}};
  const Graph g = gen_graphon(spec, 400, 5, /*record_latents=*/true);
  std::uint64_t cross_pairs = 0, cross_edges = 0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v = u + 1; v < g.vertex_count(); ++v) {
      if ((g.feature_row(u)[0] < 0.5) != (g.feature_row(v)[0] < 0.5)) {
        ++cross_pairs;
        if (g.has_edge(u, v)) ++cross_edges;
      }
    }
  }
  const double fraction = static_cast<double>(cross_edges) / cross_pairs;
  const double sigma = std::sqrt(0.05 * 0.95 / static_cast<double>(cross_pairs));
  CHECK(std::abs(fraction - 0.05) <= 3.0 * sigma);
}

TEST_CASE("gen_graphon constant grid matches ER statistically") {
  const double p = 0.2;
  GraphonSpec spec{{{p}}};
  const Graph g = gen_graphon(spec, 300, 17);
  const double pairs = 300.0 * 299.0 / 2.0;
  const double sigma = std::sqrt(pairs * p * (1 - p));
  CHECK(std::abs(static_cast<double>(g.edge_count()) - pairs * p) <= 3.0 * sigma);
  CHECK_THROWS_AS(gen_graphon(GraphonSpec{{{0.3, 0.0}, {0.1, 0.3}}}, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("gen_two_cliques") {
  const Graph tiny = gen_two_cliques(2, false);
  CHECK(tiny.vertex_count() == 4);
  CHECK(tiny.edge_count() == 2);
  CHECK(weak_component_count(tiny) == 2);

  const Graph bridged = gen_two_cliques(6, true);
  CHECK(bridged.edge_count() == 31);
  CHECK(weak_component_count(bridged) == 1);

  CHECK(gen_two_cliques(50, true).edge_count() -
            gen_two_cliques(50, false).edge_count() == 1);
  CHECK_THROWS_AS(gen_two_cliques(1, false), std::invalid_argument);
}

TEST_CASE("exact_triangle_statistic") {
  const Graph k3 = from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
  // Brute force over all 27 ordered triples sampled with replacement.
  std::uint64_t hits = 0;
  for (VertexId u = 0; u < 3; ++u)
    for (VertexId v = 0; v < 3; ++v)
      for (VertexId q = 0; q < 3; ++q)
        if (k3.has_edge(u, v) && k3.has_edge(u, q) && k3.has_edge(q, v)) ++hits;
  CHECK(exact_triangle_statistic(k3) == doctest::Approx(hits / 27.0));
  CHECK(exact_triangle_statistic(k3) == doctest::Approx(6.0 / 27.0));

  CHECK(exact_triangle_statistic(from_pairs(5, {})) == 0.0);

  const Graph k4 = gen_er(4, 1.0, 0);
  CHECK(exact_triangle_statistic(k4) == doctest::Approx(0.375));

  const Graph directed = Graph::from_edges(
      2, std::vector<std::pair<VertexId, VertexId>>{{0, 1}}, true);
  CHECK_THROWS_AS(exact_triangle_statistic(directed), std::invalid_argument);
}

TEST_CASE("triangle statistic range and zero-iff-triangle-free") {
  Rng rng(42);
  for (int rep = 0; rep < 30; ++rep) {
    const auto n = static_cast<VertexId>(5 + rng.below(46));
    const Graph g = gen_er(n, 0.15, rng.next_u64());
    const double stat = exact_triangle_statistic(g);
    CHECK(stat >= 0.0);
    CHECK(stat <= 1.0);
    CHECK((stat == 0.0) == (triple_scan_triangles(g) == 0));
    CHECK(exact_triangle_count(g) == triple_scan_triangles(g));
  }
}

TEST_CASE("exact clustering and degree oracles") {
  const Graph k3 = from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(exact_local_clustering(k3) == doctest::Approx(1.0));
  CHECK(exact_max_degree(k3) == 2);

  const Graph star = from_pairs(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(exact_local_clustering(star) == doctest::Approx(0.0));
  CHECK(exact_max_degree(star) == 4);

  const Graph path = from_pairs(3, {{0, 1}, {1, 2}});
  CHECK(exact_global_clustering(path) == doctest::Approx(0.0));
}

TEST_CASE("add_random_edges adds exactly the requested new edges") {
  const Graph g = gen_er(100, 0.05, 3);
  const Graph g2 = add_random_edges(g, 17, 4);
  CHECK(g2.edge_count() == g.edge_count() + 17);
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v : g.out_neighbors(u)) {
      CHECK(g2.has_edge(u, v));
    }
  }
}

TEST_CASE("feature validation") {
  Graph g = gen_er(3, 1.0, 0);
  CHECK_THROWS_AS(g.set_features({0.1, 0.2, 1.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(g.set_features({0.1, 0.2}, 1), std::invalid_argument);
  g.set_features({0.0, 0.5, 1.0}, 1);
  CHECK(g.has_features());
}
