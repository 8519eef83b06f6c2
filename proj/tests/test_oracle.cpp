#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "admg/graph_io.hpp"
#include "admg/oracle.hpp"
#include "support/brute.hpp"

using namespace admg;

namespace {

Assignment assign(const Cadmg& g, std::vector<std::pair<std::string, int>> vals) {
  Assignment a;
  for (auto& [l, v] : vals) a.set(g.id(l), v);
  return a;
}

/// U -> X, U -> Y, X -> Y with hand-written tables.
CptModel bow_model() {
  auto dag = parse_latent_dag("latent U\nU -> X\nU -> Y\nX -> Y\n");
  // ids follow label order: U, X, Y
  std::vector<std::vector<double>> cpt = {
      {0.3, 0.7},
      {0.9, 0.1, 0.2, 0.8},
      {0.6, 0.4, 0.1, 0.9, 0.5, 0.5, 0.25, 0.75},
  };
  return make_model(dag, {2, 2, 2}, cpt);
}

}  // namespace

TEST_CASE("single observed vertex") {
  auto m = make_model(parse_latent_dag("node v\n"), {2}, {{0.4, 0.6}});
  auto p = joint(m);
  CHECK(p.at(0) == doctest::Approx(0.4));
  CHECK(p.at(1) == doctest::Approx(0.6));
}

TEST_CASE("independent vertices multiply") {
  auto m = make_model(parse_latent_dag("node a b\n"), {2, 2}, {{0.2, 0.8}, {0.7, 0.3}});
  auto p = joint(m);
  const auto& g = m.projection;
  CHECK(p.probability(assign(g, {{"a", 0}, {"b", 0}})) == doctest::Approx(0.14));
  CHECK(p.probability(assign(g, {{"a", 1}, {"b", 1}})) == doctest::Approx(0.24));
}

TEST_CASE("confounded pair by hand") {
  auto m = bow_model();
  const auto& g = m.projection;
  CHECK(g.has_bidirected(g.id("X"), g.id("Y")));
  CHECK(g.has_directed(g.id("X"), g.id("Y")));
  const double pu[2] = {0.3, 0.7};
  const double px[2][2] = {{0.9, 0.1}, {0.2, 0.8}};          // [u][x]
  const double py[2][2][2] = {{{0.6, 0.4}, {0.5, 0.5}},      // [u][x][y]
                              {{0.1, 0.9}, {0.25, 0.75}}};
  auto p = joint(m);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      double expected = 0.0;
      double intervened = 0.0;
      for (int u = 0; u < 2; ++u) {
        expected += pu[u] * px[u][x] * py[u][x][y];
        intervened += pu[u] * py[u][x][y];
      }
      CHECK(std::abs(p.probability(assign(g, {{"X", x}, {"Y", y}})) - expected) < 1e-15);
      auto e = effect(m, VertexSet::single(g.id("Y")), assign(g, {{"X", x}}));
      CHECK(std::abs(e.at(static_cast<std::uint64_t>(y)) - intervened) < 1e-15);
    }
  }
  // confounding makes the interventional and observational conditionals differ
  auto e = effect(m, VertexSet::single(g.id("Y")), assign(g, {{"X", 0}}));
  const double conditional = p.probability(assign(g, {{"X", 0}, {"Y", 0}})) / p.probability(assign(g, {{"X", 0}}));
  CHECK(std::abs(e.at(0) - conditional) > 1e-3);
}

TEST_CASE("empty intervention is the joint") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto m = random_model(seed, 5, 2, 0.4);
    CHECK(truncated(m, {}).max_abs_diff(joint(m)) < 1e-15);
  }
}

TEST_CASE("unconfounded roots: intervening equals conditioning") {
  auto m = model_for_graph(parse_graph("a -> b\nb -> c\n"), 4);
  const auto& g = m.projection;
  auto p = joint(m);
  for (int a = 0; a < 2; ++a) {
    auto e = effect(m, VertexSet::single(g.id("c")), assign(g, {{"a", a}}));
    const double cond = p.probability(assign(g, {{"a", a}, {"c", 0}})) / p.probability(assign(g, {{"a", a}}));
    CHECK(std::abs(e.at(0) - cond) < 1e-12);
  }
}

TEST_CASE("effects match an independent truncation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto m = random_model(seed, 5, 2, 0.5);
    const auto& g = m.projection;
    std::mt19937_64 rng(seed);
    VertexSet y = VertexSet{rng()} & g.random();
    VertexSet x = (VertexSet{rng()} & g.random()) - y;
    if (y.empty()) continue;
    const Assignment xa{x, VertexSet{rng()} & x};
    auto e = effect(m, y, xa);
    for (std::uint64_t code = 0; code < e.size(); ++code) {
      const Assignment ya{y, unpack(y, code)};
      CHECK(std::abs(e.at(code) - brute::truncated_probability(m, ya, xa)) < 1e-12);
    }
  }
}

TEST_CASE("generation is deterministic and well-formed") {
  auto a = random_model(7, 6, 3, 0.4);
  auto b = random_model(7, 6, 3, 0.4);
  CHECK(format_model(a) == format_model(b));
  CHECK(a.projection == b.projection);
  CHECK(format_model(random_model(8, 6, 3, 0.4)) != format_model(a));

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto m = random_model(seed, 5, 2, 0.3);
    CHECK_FALSE(m.projection.bidirected_edges().empty());
    CHECK(std::abs(joint(m).total() - 1.0) < 1e-12);
    for (std::size_t v = 0; v < m.cpt.size(); ++v) {
      for (double p : m.cpt[v]) {
        CHECK(p >= 0.05 - 1e-12);
        CHECK(p <= 0.95 + 1e-12);
      }
    }
  }
  auto dag = random_model(3, 5, 0, 0.5);
  CHECK(dag.projection.bidirected_edges().empty());
}

TEST_CASE("wider latents") {
  ModelOptions opts;
  opts.latent_cardinality = 4;
  auto m = random_model(11, 5, 2, 0.4, opts);
  for (std::size_t v = 0; v < m.cardinality.size(); ++v) {
    CHECK(m.cardinality[v] == (m.to_observed[v] < 0 ? 4 : 2));
  }
  CHECK(std::abs(joint(m).total() - 1.0) < 1e-12);
  CHECK(table_from_params(oracle_q_params(m)).max_abs_diff(joint(m)) < 1e-10);
}

TEST_CASE("oracle parameters reproduce the observed joint") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 3 + static_cast<int>(seed % 6);
    auto m = random_model(seed, n, 1 + static_cast<int>(seed % 3), 0.4);
    auto omega = oracle_q_params(m);
    CHECK(omega.complete());
    CHECK(table_from_params(omega).max_abs_diff(joint(m)) < 1e-10);
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("invalid tables are rejected") {
  auto dag = parse_latent_dag("node v\n");
  CHECK_THROWS(make_model(dag, {2}, {{0.5, 0.6}}));
  CHECK_THROWS(make_model(dag, {2}, {{0.5}}));
  CHECK_THROWS(oracle_q_params(bow_model(), parse_graph("X -> Y\n")));
}
