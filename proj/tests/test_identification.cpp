#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "admg/graph_io.hpp"
#include "admg/identification.hpp"
#include "admg/oracle.hpp"
#include "support/brute.hpp"

using namespace admg;

namespace {

VertexSet S(const Cadmg& g, std::vector<std::string> labels) { return g.set_of(labels); }

Assignment assign(const Cadmg& g, std::vector<std::pair<std::string, int>> vals) {
  Assignment a;
  for (auto& [l, v] : vals) a.set(g.id(l), v);
  return a;
}

/// P(a | b) straight from marginal sums of the joint.
double cond(const ProbTable& p, const Assignment& a, const Assignment& b) {
  return p.probability(a.merged(b)) / p.probability(b);
}

/// The worked-example functional for P(x5 | do(x3)) with x~1 = x~2 = t.
double displayed_functional(const Cadmg& g, const ProbTable& p, int x3, int x5, int t) {
  double outer = 0.0;
  for (int x4 = 0; x4 < 2; ++x4) {
    double left = 0.0;
    for (int x2 = 0; x2 < 2; ++x2) {
      left += cond(p, assign(g, {{"x4", x4}}), assign(g, {{"x3", x3}, {"x2", x2}, {"x1", t}})) *
              cond(p, assign(g, {{"x2", x2}}), assign(g, {{"x1", t}}));
    }
    double right = 0.0;
    for (int x1 = 0; x1 < 2; ++x1) {
      for (int x3p = 0; x3p < 2; ++x3p) {
        right += cond(p, assign(g, {{"x5", x5}}), assign(g, {{"x4", x4}, {"x3", x3p}, {"x2", t}, {"x1", x1}})) *
                 cond(p, assign(g, {{"x3", x3p}}), assign(g, {{"x2", t}, {"x1", x1}})) *
                 p.probability(assign(g, {{"x1", x1}}));
      }
    }
    outer += left * right;
  }
  return outer;
}

ProbTable uniform_table(const Cadmg& g) {
  const VertexSet v = g.random();
  return ProbTable(g.universe_ptr(), v, {}, std::vector<double>(std::size_t{1} << v.size(), 1.0 / (1 << v.size())));
}

}  // namespace

TEST_CASE("empty intervention is a marginal") {
  auto g = parse_graph("a -> b\n");
  auto r = identify(g, S(g, {"b"}), {});
  REQUIRE(r.identified());
  CHECK(r.expr->kind == ExprKind::kMarginal);
  CHECK(evaluate_expr(r.expr, uniform_table(g), assign(g, {{"b", 1}})) == doctest::Approx(0.5).epsilon(1e-12));

  auto m = random_model(3, 3, 1, 0.5);
  auto p = joint(m);
  auto& pg = m.projection;
  auto full = identify(pg, pg.random(), {});
  REQUIRE(full.identified());
  for (std::uint64_t code = 0; code < p.size(); ++code) {
    Assignment a{pg.random(), unpack(pg.random(), code)};
    CHECK(std::abs(evaluate_expr(full.expr, p, a) - p.at(code)) < 1e-14);
  }
}

TEST_CASE("bow graph is not identifiable") {
  auto g = fixtures::bow();
  auto r = identify(g, S(g, {"Y"}), S(g, {"X"}));
  REQUIRE_FALSE(r.identified());
  REQUIRE(r.hedge.has_value());
  CHECK(r.hedge->roots == S(g, {"Y"}));
  CHECK(r.hedge->f == S(g, {"Y"}));
  CHECK(r.hedge->f_prime == S(g, {"X", "Y"}));
  CHECK(validate_hedge(g, *r.hedge));
  CHECK(find_hedge(g, S(g, {"X"}), S(g, {"Y"})) == r.hedge);
}

TEST_CASE("worked example effect matches the displayed functional") {
  auto g = fixtures::zigzag();
  auto r = identify(g, S(g, {"x5"}), S(g, {"x3"}));
  REQUIRE(r.identified());
  CHECK_FALSE(find_hedge(g, S(g, {"x3"}), S(g, {"x5"})).has_value());
  CHECK_FALSE(format_expr(r.expr, g).empty());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto m = model_for_graph(g, seed);
    auto p = joint(m);
    for (int x3 = 0; x3 < 2; ++x3) {
      for (int x5 = 0; x5 < 2; ++x5) {
        const Assignment vals = assign(g, {{"x3", x3}, {"x5", x5}});
        const double id0 = evaluate_expr(r.expr, p, vals, {0});
        const double id1 = evaluate_expr(r.expr, p, vals, {1});
        CHECK(std::abs(id0 - displayed_functional(g, p, x3, x5, 0)) < 1e-10);
        CHECK(std::abs(id1 - displayed_functional(g, p, x3, x5, 1)) < 1e-10);
        const double truth = brute::truncated_probability(m, assign(g, {{"x5", x5}}), assign(g, {{"x3", x3}}));
        CHECK(std::abs(id0 - truth) < 1e-10);
      }
    }
  }
}

TEST_CASE("DAGs are always identifiable") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    auto g = brute::random_admg(rng, 6, 0.4, 0.0);
    VertexId x = static_cast<VertexId>(rng() % 6);
    VertexId y = static_cast<VertexId>(rng() % 6);
    if (x == y) continue;
    CHECK_FALSE(find_hedge(g, VertexSet::single(x), VertexSet::single(y)).has_value());
  }
}

TEST_CASE("evaluation rejects unnormalized tables") {
  auto g = parse_graph("a -> b\n");
  auto r = identify(g, S(g, {"b"}), S(g, {"a"}));
  REQUIRE(r.identified());
  ProbTable bad(g.universe_ptr(), g.random(), {}, {0.5, 0.5, 0.5, 0.5});
  CHECK_THROWS_AS(evaluate_expr(r.expr, bad, assign(g, {{"a", 0}, {"b", 0}})), NumericalError);
}

TEST_CASE("failure coincides with an exhaustive hedge search") {
  std::mt19937_64 rng(77);
  int failures = 0;
  int total = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + static_cast<int>(rng() % 4);
    auto g = brute::random_admg(rng, n, 0.4, 0.4);
    for (VertexId x = 0; x < n; ++x) {
      for (VertexId y = 0; y < n; ++y) {
        if (x == y) continue;
        auto r = identify(g, VertexSet::single(y), VertexSet::single(x));
        const bool hedge = brute::hedge_exists(g, VertexSet::single(x), VertexSet::single(y));
        CHECK(r.identified() != hedge);
        if (!r.identified()) {
          ++failures;
          CHECK(validate_hedge(g, *r.hedge));
        }
        ++total;
      }
    }
  }
  CHECK(failures > 0);
  CHECK(failures < total);
}

TEST_CASE("the district split runs at most once per query") {
  std::mt19937_64 rng(88);
  for (int t = 0; t < 300; ++t) {
    const int n = 3 + static_cast<int>(rng() % 6);
    auto g = brute::random_admg(rng, n, 0.35, 0.3);
    VertexSet y{rng() & ((std::uint64_t{1} << n) - 1)};
    VertexSet x = VertexSet{rng() & ((std::uint64_t{1} << n) - 1)} - y;
    if (y.empty()) continue;
    auto r = identify(g, y, x);
    CHECK(r.district_splits <= 1);
    if (!r.identified()) CHECK(validate_hedge(g, *r.hedge));
  }
}

TEST_CASE("identified effects match the truncation formula") {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto m = random_model(seed, 5, 2, 0.4);
    const auto& g = m.projection;
    auto p = joint(m);
    std::mt19937_64 rng(seed);
    for (int q = 0; q < 4; ++q) {
      VertexSet y{rng() & 31U};
      VertexSet x = VertexSet{rng() & 31U} - y;
      if (y.empty()) continue;
      auto r = identify(g, y, x);
      if (!r.identified()) continue;
      for (std::uint64_t xv = 0; xv < (std::uint64_t{1} << x.size()); ++xv) {
        const Assignment xa{x, unpack(x, xv)};
        auto truth = effect(m, y, xa);
        for (std::uint64_t yv = 0; yv < truth.size(); ++yv) {
          const Assignment ya{y, unpack(y, yv)};
          const double got0 = evaluate_expr(r.expr, p, ya.merged(xa), {0});
          const double got1 = evaluate_expr(r.expr, p, ya.merged(xa), {1});
          CHECK(std::abs(got0 - truth.at(yv)) < 1e-10);
          CHECK(std::abs(got1 - got0) < 1e-10);
          ++compared;
        }
      }
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("intrinsic sets through identifiability") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 60; ++t) {
    auto g = brute::random_admg(rng, 5, 0.4, 0.4);
    for (std::uint64_t m = 1; m < 32; ++m) {
      CHECK(is_intrinsic_by_hedge(g, VertexSet{m}) == brute::is_intrinsic(g, VertexSet{m}));
    }
  }
}

TEST_CASE("conditional effects") {
  auto chain = parse_graph("a -> b\nb -> c\n");
  auto plain = identify_conditional(chain, S(chain, {"c"}), {}, S(chain, {"a"}));
  REQUIRE(plain.identified());
  CHECK(plain.denominator == nullptr);

  auto m = model_for_graph(chain, 5);
  auto p = joint(m);
  auto r = identify_conditional(chain, S(chain, {"c"}), S(chain, {"b"}), S(chain, {"a"}));
  REQUIRE(r.identified());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const double num = brute::truncated_probability(m, assign(chain, {{"b", b}, {"c", c}}), assign(chain, {{"a", a}}));
        const double den = brute::truncated_probability(m, assign(chain, {{"b", b}}), assign(chain, {{"a", a}}));
        const double got = evaluate_conditional(r, p, assign(chain, {{"a", a}, {"b", b}, {"c", c}}));
        CHECK(std::abs(got - num / den) < 1e-10);
      }
    }
  }

  auto bow = fixtures::bow();
  auto failed = identify_conditional(bow, S(bow, {"Y"}), {}, S(bow, {"X"}));
  CHECK_FALSE(failed.identified());
  REQUIRE(failed.hedge.has_value());
  CHECK(failed.hedge->f == S(bow, {"Y"}));
}

TEST_CASE("argument checks") {
  auto g = fixtures::bow();
  CHECK_THROWS_AS(identify(g, S(g, {"X"}), S(g, {"X"})), std::invalid_argument);
  CHECK_THROWS_AS(identify(g, {}, S(g, {"X"})), std::invalid_argument);
}
