#include "rbs/oracle.hpp"

#include <array>
#include <vector>

#include <doctest.h>

#include "rbs/errors.hpp"
#include "test_util.hpp"

using namespace rbs;

namespace {

Graph path2() {
  return Graph::from_edges(2, std::vector<std::pair<VertexId, VertexId>>{{0, 1}},
                           false);
}

}  // namespace

TEST_CASE("sample_vertex on a single-vertex graph") {
  const Graph g = Graph::from_edges(1, {}, false);
  OracleSession s(g, 1);
  for (int i = 0; i < 20; ++i) CHECK(s.sample_vertex() == 0);
}

TEST_CASE("sample_vertex uniformity at n=4") {
  const Graph g = gen_er(4, 0.0, 0);
  OracleSession s(g, 2);
  std::array<std::uint64_t, 4> freq{};
  const std::uint64_t draws = 100000;
  for (std::uint64_t i = 0; i < draws; ++i) ++freq[s.sample_vertex()];
  for (std::uint64_t f : freq) {
    CHECK(std::abs(static_cast<double>(f) / draws - 0.25) <= 0.01);
  }
}

TEST_CASE("sample_vertex errors") {
  const Graph empty = Graph::from_edges(0, {}, false);
  OracleSession s(empty, 1);
  CHECK_THROWS_AS(s.sample_vertex(), InvalidStateError);

  const Graph g = gen_er(4, 0.0, 0);
  OracleSession zero_budget(g, 1, 0);
  CHECK_THROWS_AS(zero_budget.sample_vertex(), BudgetExceededError);
}

TEST_CASE("sample_neighbor behavior") {
  const Graph isolated = Graph::from_edges(1, {}, false);
  OracleSession s(isolated, 3);
  CHECK_FALSE(s.sample_neighbor(0).has_value());
  CHECK(s.counts().sample_neighbor == 1);  // counted either way

  const Graph p = path2();
  OracleSession sp(p, 4);
  CHECK(sp.sample_neighbor(0) == 1);

  const Graph star = Graph::from_edges(
      5, std::vector<std::pair<VertexId, VertexId>>{{0, 1}, {0, 2}, {0, 3}, {0, 4}},
      false);
  OracleSession ss(star, 5);
  std::array<std::uint64_t, 5> freq{};
  const std::uint64_t draws = 100000;
  for (std::uint64_t i = 0; i < draws; ++i) ++freq[*ss.sample_neighbor(0)];
  for (VertexId leaf = 1; leaf <= 4; ++leaf) {
    CHECK(std::abs(static_cast<double>(freq[leaf]) / draws - 0.25) <= 0.01);
  }
  CHECK_THROWS_AS(ss.sample_neighbor(9), std::invalid_argument);
}

TEST_CASE("is_adjacent") {
  const Graph p = path2();
  OracleSession s(p, 6);
  CHECK(s.is_adjacent(0, 1));
  CHECK(s.is_adjacent(1, 0));
  CHECK_FALSE(s.is_adjacent(0, 0));

  // K4 minus one edge
  const Graph g = Graph::from_edges(
      4,
      std::vector<std::pair<VertexId, VertexId>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}},
      false);
  OracleSession s2(g, 7);
  CHECK_FALSE(s2.is_adjacent(2, 3));
}

TEST_CASE("query counters") {
  const Graph g = gen_er(8, 0.5, 1);
  OracleSession s(g, 8);
  CHECK(s.counts().total() == 0);
  s.sample_vertex();
  s.sample_vertex();
  s.sample_vertex();
  CHECK(s.counts().sample_vertex == 3);
  CHECK(s.counts().total() == 3);
  s.is_adjacent(0, 1);
  s.sample_neighbor(0);
  CHECK(s.counts().is_adjacent == 1);
  CHECK(s.counts().sample_neighbor == 1);
  CHECK(s.counts().total() == 5);
}

TEST_CASE("determinism: same seed, same call sequence") {
  const Graph g = gen_er(50, 0.2, 9);
  OracleSession a(g, 77), b(g, 77);
  for (int i = 0; i < 200; ++i) {
    const VertexId va = a.sample_vertex();
    const VertexId vb = b.sample_vertex();
    CHECK(va == vb);
    CHECK(a.sample_neighbor(va) == b.sample_neighbor(vb));
  }
  CHECK(a.counts() == b.counts());
}

TEST_CASE("budget: exactly B successful calls, then permanent failure") {
  const Graph g = gen_er(6, 1.0, 1);
  const std::uint64_t budget = 25;
  OracleSession s(g, 10, budget);
  std::uint64_t successes = 0;
  for (int i = 0; i < 100; ++i) {
    try {
      switch (i % 3) {
        case 0: s.sample_vertex(); break;
        case 1: s.sample_neighbor(0); break;
        default: s.is_adjacent(0, 1); break;
      }
      ++successes;
    } catch (const BudgetExceededError&) {
    }
  }
  CHECK(successes == budget);
  CHECK(s.counts().total() == budget);
  CHECK_THROWS_AS(s.sample_vertex(), BudgetExceededError);
}

TEST_CASE("subsessions share counters and budget") {
  const Graph g = gen_er(6, 1.0, 1);
  OracleSession s(g, 11, 10);
  const std::uint64_t epoch = s.draw_epoch();
  OracleSession child = s.subsession(epoch, 1);
  for (int i = 0; i < 5; ++i) child.sample_vertex();
  CHECK(s.counts().sample_vertex == 5);
  for (int i = 0; i < 5; ++i) s.sample_vertex();
  CHECK_THROWS_AS(child.sample_vertex(), BudgetExceededError);
}

TEST_CASE("chi-square uniformity at significance 0.001") {
  for (const VertexId n : {4u, 16u}) {
    const Graph g = gen_er(n, 0.0, 0);
    OracleSession s(g, 1234 + n);
    std::vector<std::uint64_t> freq(n, 0);
    const std::uint64_t draws = 100000;
    for (std::uint64_t i = 0; i < draws; ++i) ++freq[s.sample_vertex()];
    const double expected = static_cast<double>(draws) / n;
    double chi2 = 0.0;
    for (std::uint64_t f : freq) {
      const double d = static_cast<double>(f) - expected;
      chi2 += d * d / expected;
    }
    CHECK(chi2 <= test::chi_square_crit_001(n - 1));
  }
}
