#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "admg/graph_io.hpp"
#include "admg/intrinsic.hpp"
#include "support/brute.hpp"

using namespace admg;

namespace {

VertexSet S(const Cadmg& g, std::vector<std::string> labels) { return g.set_of(labels); }

std::vector<VertexSet> members_of(const IntrinsicSets& sets) {
  std::vector<VertexSet> out;
  for (const auto& s : sets) out.push_back(s.members);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexSet> sorted(std::vector<VertexSet> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("closure examples") {
  auto dag = parse_graph("a -> b\nb -> c\na -> c\n");
  auto c = intrinsic_closure(dag, S(dag, {"c"}));
  CHECK(c.members == S(dag, {"c"}));
  CHECK(c.head == S(dag, {"c"}));
  CHECK(c.tail == S(dag, {"a", "b"}));

  auto bow = fixtures::bow();
  auto y = intrinsic_closure(bow, S(bow, {"Y"}));
  CHECK(y.members == bow.random());
  CHECK(y.head == S(bow, {"Y"}));
  CHECK(y.tail == S(bow, {"X"}));

  auto g = fixtures::zigzag();
  auto big = intrinsic_closure(g, S(g, {"x1", "x3", "x5"}));
  CHECK(big.members == S(g, {"x1", "x3", "x5"}));
  CHECK(big.head == S(g, {"x1", "x3", "x5"}));
  CHECK(big.tail == S(g, {"x2", "x4"}));

  CHECK_THROWS_AS(intrinsic_closure(g, S(g, {"x1", "x2"})), std::invalid_argument);
}

TEST_CASE("is_intrinsic examples") {
  auto dag = parse_graph("a -> b\n");
  CHECK(is_intrinsic(dag, S(dag, {"b"})));
  auto bow = fixtures::bow();
  CHECK_FALSE(is_intrinsic(bow, S(bow, {"Y"})));
  auto g = fixtures::zigzag();
  CHECK(is_intrinsic(g, S(g, {"x1", "x3"})));
  auto s = describe_set(g, S(g, {"x1", "x3"}));
  CHECK(s.head == S(g, {"x1", "x3"}));
  CHECK(s.tail == S(g, {"x2"}));
}

TEST_CASE("all intrinsic sets of the worked example") {
  auto g = fixtures::zigzag();
  auto sets = all_intrinsic_sets(g);
  REQUIRE(sets.size() == 9);
  struct Expected {
    std::vector<std::string> head;
    std::vector<std::string> tail;
  };
  const std::vector<Expected> expected = {
      {{"x1"}, {}},
      {{"x2"}, {"x1"}},
      {{"x1", "x3"}, {"x2"}},
      {{"x3"}, {"x2"}},
      {{"x2", "x4"}, {"x1", "x3"}},
      {{"x4"}, {"x3"}},
      {{"x1", "x3", "x5"}, {"x2", "x4"}},
      {{"x3", "x5"}, {"x2", "x4"}},
      {{"x5"}, {"x4"}},
  };
  for (const auto& e : expected) {
    const IntrinsicSet* s = sets.find_by_head(S(g, e.head));
    REQUIRE(s != nullptr);
    CHECK(s->tail == S(g, e.tail));
  }
}

TEST_CASE("DAGs and bidirected chains") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    auto g = brute::random_admg(rng, 6, 0.5, 0.0);
    auto sets = all_intrinsic_sets(g);
    CHECK(sets.size() == 6);
    for (const auto& s : sets) CHECK(s.members.size() == 1);
  }
  for (int k = 1; k <= 8; ++k) {
    auto g = fixtures::bidirected_chain(k);
    auto sets = all_intrinsic_sets(g);
    CHECK(static_cast<int>(sets.size()) == k * (k + 1) / 2);
    for (const auto& s : sets) {
      // contiguous segment: bits form one run
      const std::uint64_t b = s.members.bits();
      CHECK(((b >> std::countr_zero(b)) & ((b >> std::countr_zero(b)) + 1)) == 0);
    }
  }
}

TEST_CASE("saturation agrees with subset enumeration and the hedge definition") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 150; ++t) {
    const int n = 3 + static_cast<int>(rng() % 5);
    auto g = brute::random_admg(rng, n, 0.35, 0.35);
    auto sets = all_intrinsic_sets(g);
    CHECK(members_of(sets) == members_of(all_intrinsic_sets_exhaustive(g)));
    if (n <= 6) CHECK(members_of(sets) == brute::intrinsic_sets(g));
  }
}

TEST_CASE("saturation on CADMGs matches subset enumeration") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 150; ++t) {
    auto g = brute::random_admg(rng, 7, 0.35, 0.35);
    VertexSet s{rng() & 127U};
    if (s.empty()) continue;
    auto r = cadmg_restrict(g, s);
    CHECK(members_of(all_intrinsic_sets(r)) == members_of(all_intrinsic_sets_exhaustive(r)));
  }
}

TEST_CASE("closure is the least intrinsic superset") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    auto g = brute::random_admg(rng, 6, 0.35, 0.4);
    auto sets = all_intrinsic_sets(g);
    for (std::uint64_t m = 1; m < 64; ++m) {
      VertexSet s{m};
      if (!is_bidirected_connected(g, s)) continue;
      auto c = intrinsic_closure(g, s);
      CHECK(c.members.contains(s));
      CHECK(sets.contains(c.members));
      for (const auto& t2 : sets) {
        if (t2.members.contains(s)) CHECK(t2.members.contains(c.members));
      }
    }
  }
}

TEST_CASE("ancestral and district restrictions") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    auto g = brute::random_admg(rng, 6, 0.35, 0.4);
    auto all = all_intrinsic_sets(g);
    VertexSet a = ancestors(g, VertexSet{rng() & 63U});
    auto ga = induced_subgraph(g, a);
    std::vector<VertexSet> expected;
    for (const auto& s : all) {
      if (a.contains(s.members)) expected.push_back(s.members);
    }
    CHECK(members_of(all_intrinsic_sets(ga)) == sorted(expected));

    for (VertexSet d : districts(g)) {
      auto gd = induced_subgraph(g, d);
      std::vector<VertexSet> in_d;
      for (const auto& s : all) {
        if (d.contains(s.members)) in_d.push_back(s.members);
      }
      CHECK(members_of(all_intrinsic_sets(gd)) == sorted(in_d));
    }
  }
}

TEST_CASE("head and tail cover C and its parents") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    auto g = brute::random_admg(rng, 7, 0.35, 0.35);
    for (const auto& s : all_intrinsic_sets(g)) {
      CHECK_FALSE(s.head.empty());
      CHECK((s.head | s.tail) == (s.members | g.parents(s.members)));
      CHECK_FALSE(s.head.intersects(s.tail));
    }
  }
}

TEST_CASE("head partition") {
  auto g = fixtures::zigzag();
  auto sets = all_intrinsic_sets(g);
  CHECK(head_partition(sets, {}).empty());
  auto p = head_partition(sets, S(g, {"x1", "x2", "x3"}));
  CHECK(sorted(p) == sorted({S(g, {"x1", "x3"}), S(g, {"x2"})}));

  auto dag = parse_graph("a -> b\nb -> c\n");
  auto ds = all_intrinsic_sets(dag);
  CHECK(head_partition(ds, dag.random()).size() == 3);
}

TEST_CASE("head partitions are partitions into heads") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 100; ++t) {
    auto g = brute::random_admg(rng, 6, 0.35, 0.4);
    auto sets = all_intrinsic_sets(g);
    for (std::uint64_t m = 0; m < 64; ++m) {
      VertexSet b{m};
      VertexSet seen;
      for (VertexSet h : head_partition(sets, b)) {
        CHECK_FALSE(seen.intersects(h));
        seen |= h;
        CHECK(sets.find_by_head(h) != nullptr);
      }
      CHECK(seen == b);
    }
  }
}

TEST_CASE("heads with a given parent") {
  auto lone = parse_graph("node a b c\na -> b\n");
  CHECK(heads_with_parent(lone, lone.id("c")).empty());

  auto g = fixtures::zigzag();
  auto sub = cadmg_restrict(g, S(g, {"x4", "x5"}));
  auto h = heads_with_parent(sub, g.id("x4"));
  REQUIRE(h.size() == 1);
  CHECK(h[0].head == S(g, {"x5"}));
  CHECK(h[0].tail == S(g, {"x3"}));

  auto chain = fixtures::bidirected_chain(3);
  CHECK(heads_with_parent(chain, chain.id(fixtures::family_label(2))).empty());
  auto confounded = parse_graph("a <-> b\nb -> c\nc <-> d\n");
  auto join = heads_with_parent(confounded, confounded.id("b"));
  std::vector<VertexSet> spans;
  for (const auto& s : join) spans.push_back(s.members);
  CHECK(sorted(spans) == sorted({S(confounded, {"c"}), S(confounded, {"a", "c"}), S(confounded, {"c", "d"}),
                                 S(confounded, {"a", "c", "d"})}));
}
