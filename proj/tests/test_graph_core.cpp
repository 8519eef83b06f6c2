#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "admg/graph.hpp"
#include "admg/graph_io.hpp"
#include "support/brute.hpp"

using namespace admg;

namespace {

VertexSet S(const Cadmg& g, std::vector<std::string> labels) { return g.set_of(labels); }

}  // namespace

TEST_CASE("vertex sets") {
  VertexSet a = VertexSet::first_n(3);
  CHECK(a.size() == 3);
  CHECK(a.contains(2));
  CHECK_FALSE(a.contains(3));
  VertexSet b = VertexSet::single(1) | VertexSet::single(5);
  CHECK((a & b) == VertexSet::single(1));
  CHECK((b - a) == VertexSet::single(5));
  std::vector<VertexId> ids(b.begin(), b.end());
  CHECK(ids == std::vector<VertexId>{1, 5});
  CHECK(pack(b, VertexSet::single(5)) == 2);
  CHECK(unpack(b, 3) == b);
}

TEST_CASE("parse and format round trip") {
  auto g = parse_graph("# fig\nnode z\nx1 -> x2\nx1 <-> x2\n");
  CHECK(g.labels(g.random()) == std::vector<std::string>{"x1", "x2", "z"});
  CHECK(g.has_directed(g.id("x1"), g.id("x2")));
  CHECK(g.has_bidirected(g.id("x2"), g.id("x1")));
  CHECK(parse_graph(format_graph(g)) == g);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_graph("a -> b\nb -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("a -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("a => b\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("a -> b\na -> b\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("latent u\nu -> a\n"), ParseError);
  try {
    parse_graph("a -> b\n\nc ~ d\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("structural invariants are enforced") {
  CHECK_THROWS_AS(GraphBuilder().add_directed("a", "b").add_directed("b", "c").add_directed("c", "a").build(),
                  StructuralError);
  CHECK_THROWS_AS(GraphBuilder().add_context("w").add_directed("a", "w").build(), StructuralError);
  CHECK_THROWS_AS(GraphBuilder().add_context("w").add_bidirected("a", "w").build(), StructuralError);
  CHECK_NOTHROW(GraphBuilder().add_directed("X", "Y").add_bidirected("X", "Y").build());
}

TEST_CASE("ancestors") {
  auto chain = parse_graph("x1 -> x2\nx2 -> x3\n");
  CHECK(ancestors(chain, S(chain, {"x3"})) == chain.vertices());
  CHECK(ancestors(chain, S(chain, {"x1"})) == S(chain, {"x1"}));

  auto g = fixtures::zigzag();
  auto mutilated = cadmg_restrict(g, g.random() - S(g, {"x3"}));
  CHECK((ancestors(mutilated, S(g, {"x5"})) & mutilated.random()) == S(g, {"x4", "x5"}));
}

TEST_CASE("ancestors is a closure operator") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto g = brute::random_admg(rng, 6, 0.4, 0.3);
    VertexSet s{rng() & 63U};
    VertexSet a = ancestors(g, s);
    CHECK(a.contains(s));
    CHECK(ancestors(g, a) == a);
    CHECK(ancestors(g, s | VertexSet::single(0)).contains(a));
    CHECK(a == brute::ancestors(g, s));
  }
}

TEST_CASE("districts") {
  auto dag = parse_graph("a -> b\nb -> c\n");
  CHECK(districts(dag).size() == 3);
  auto bow = fixtures::bow();
  REQUIRE(districts(bow).size() == 1);
  CHECK(districts(bow)[0] == bow.random());
  auto g = fixtures::zigzag();
  auto d = districts(g);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == S(g, {"x1", "x3", "x5"}));
  CHECK(d[1] == S(g, {"x2", "x4"}));
}

TEST_CASE("districts form a partition of maximal connected blocks") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    auto g = brute::random_admg(rng, 7, 0.3, 0.3);
    VertexSet seen;
    for (VertexSet d : districts(g)) {
      CHECK_FALSE(seen.intersects(d));
      seen |= d;
      CHECK(is_bidirected_connected(g, d));
      for (VertexId v : d) CHECK((g.spouses(v) - d).empty());
    }
    CHECK(seen == g.random());
  }
}

TEST_CASE("cadmg restriction") {
  auto bow = fixtures::bow();
  CHECK(cadmg_restrict(bow, bow.random()) == bow);
  auto r = cadmg_restrict(bow, S(bow, {"Y"}));
  CHECK(r.random() == S(bow, {"Y"}));
  CHECK(r.context() == S(bow, {"X"}));
  CHECK(r.directed_edges().size() == 1);
  CHECK(r.bidirected_edges().empty());

  auto g = fixtures::zigzag();
  auto s = cadmg_restrict(g, S(g, {"x4", "x5"}));
  CHECK(s.random() == S(g, {"x4", "x5"}));
  CHECK(s.context() == S(g, {"x3"}));
  CHECK(s == parse_graph("context x3\nx3 -> x4\nx4 -> x5\n"));
}

TEST_CASE("restricted context vertices have no incoming edges") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    auto g = brute::random_admg(rng, 6, 0.4, 0.4);
    auto r = cadmg_restrict(g, VertexSet{rng() & 63U});
    for (VertexId w : r.context()) {
      CHECK(r.parents(w).empty());
      CHECK(r.spouses(w).empty());
    }
  }
}

TEST_CASE("induced subgraph") {
  auto bow = fixtures::bow();
  CHECK(induced_subgraph(bow, bow.vertices()) == bow);
  CHECK(induced_subgraph(bow, {}).vertices().empty());
  auto y = induced_subgraph(bow, S(bow, {"Y"}));
  CHECK(y.edge_count() == 0);
  CHECK(y.random() == S(bow, {"Y"}));
}

TEST_CASE("latent projection examples") {
  auto dag = parse_latent_dag("a -> b\nb -> c\n");
  CHECK(latent_projection(dag) == parse_graph("a -> b\nb -> c\n"));

  auto canonical = parse_latent_dag("latent U\nA -> X\nX -> Y\nU -> X\nU -> Y\n");
  auto p = latent_projection(canonical, canonical.dag().set_of({"X", "Y"}));
  CHECK(p == parse_graph("X -> Y\nX <-> Y\n"));

  for (int k = 2; k <= 6; ++k) {
    std::string text;
    for (int i = 0; i <= k; ++i) text += "latent L" + std::to_string(i) + "\n";
    for (int i = 1; i <= k; ++i) {
      text += "L" + std::to_string(i - 1) + " -> Y" + std::to_string(i) + "\n";
      text += "L" + std::to_string(i) + " -> Y" + std::to_string(i) + "\n";
    }
    auto proj = latent_projection(parse_latent_dag(text));
    CHECK(proj.directed_edges().empty());
    CHECK(static_cast<int>(proj.bidirected_edges().size()) == k - 1);
    for (int i = 1; i < k; ++i) {
      CHECK(proj.has_bidirected(proj.id("Y" + std::to_string(i)), proj.id("Y" + std::to_string(i + 1))));
    }
  }
  CHECK_THROWS_AS(latent_projection(canonical, canonical.dag().set_of({"U", "X"})), std::invalid_argument);
}

TEST_CASE("latent projection matches path-based projection") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    auto g = brute::random_admg(rng, 7, 0.35, 0.2);
    VertexSet keep{rng() & 127U};
    CHECK(latent_projection(g, keep) == brute::projection(g, keep));
  }
}

TEST_CASE("projection preserves m-separation") {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    auto g = brute::random_admg(rng, 8, 0.35, 0.0);
    VertexSet latent{rng() & 255U & ~std::uint64_t{7}};
    LatentDag d(g, latent);
    auto proj = latent_projection(g, g.vertices() - latent);
    const std::vector<VertexId> obs((g.vertices() - latent).begin(), (g.vertices() - latent).end());
    for (VertexId x : obs) {
      for (VertexId y : obs) {
        if (x >= y) continue;
        const VertexSet rest = g.vertices() - latent - VertexSet::single(x) - VertexSet::single(y);
        for (std::uint64_t m = 0; m < 8; ++m) {
          VertexSet z = VertexSet{rng()} & rest;
          const bool a = m_separated(proj, VertexSet::single(x), VertexSet::single(y), z);
          const bool b = brute::m_separated(g, VertexSet::single(x), VertexSet::single(y), z);
          CHECK(a == b);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("m-separation") {
  auto chain = parse_graph("a -> b\nb -> c\n");
  CHECK(m_separated(chain, S(chain, {"a"}), S(chain, {"c"}), S(chain, {"b"})));
  CHECK_FALSE(m_separated(chain, S(chain, {"a"}), S(chain, {"c"}), {}));
  auto collider = parse_graph("a -> b\nc -> b\n");
  CHECK(m_separated(collider, S(collider, {"a"}), S(collider, {"c"}), {}));
  CHECK_FALSE(m_separated(collider, S(collider, {"a"}), S(collider, {"c"}), S(collider, {"b"})));
  auto bow = fixtures::bow();
  CHECK_FALSE(m_separated(bow, S(bow, {"X"}), S(bow, {"Y"}), {}));
  CHECK_THROWS_AS(m_separated(bow, S(bow, {"X"}), S(bow, {"X"}), {}), std::invalid_argument);
}

TEST_CASE("m-separation agrees with path enumeration") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    auto g = brute::random_admg(rng, 6, 0.35, 0.3);
    VertexId x = static_cast<VertexId>(rng() % 6);
    VertexId y = static_cast<VertexId>(rng() % 6);
    if (x == y) continue;
    VertexSet z = VertexSet{rng() & 63U} - VertexSet::single(x) - VertexSet::single(y);
    CHECK(m_separated(g, VertexSet::single(x), VertexSet::single(y), z) ==
          brute::m_separated(g, VertexSet::single(x), VertexSet::single(y), z));
  }
}

TEST_CASE("topological order") {
  auto chain = parse_graph("c -> b\nb -> a\n");
  CHECK(topological_order(chain) == std::vector<VertexId>{chain.id("c"), chain.id("b"), chain.id("a")});
  auto empty = parse_graph("node q p r\n");
  CHECK(topological_order(empty) == std::vector<VertexId>{0, 1, 2});
  auto diamond = parse_graph("a -> b\na -> c\nb -> d\nc -> d\n");
  CHECK(diamond.labels(diamond.vertices()).size() == 4);
  auto order = topological_order(diamond);
  std::vector<std::string> names;
  for (VertexId v : order) names.push_back(diamond.label(v));
  CHECK(names == std::vector<std::string>{"a", "b", "c", "d"});
}
