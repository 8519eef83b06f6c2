#pragma once

#include <unordered_map>
#include <vector>

#include "admg/graph.hpp"

namespace admg {

/// An intrinsic set C with its recursive head rh(C) and tail
/// (C \ head) | (Pa(C) \ C).
struct IntrinsicSet {
  VertexSet members;
  VertexSet head;
  VertexSet tail;

  bool operator==(const IntrinsicSet&) const = default;
};

/// Childless vertices of G_C.
VertexSet recursive_head(const Cadmg& g, VertexSet c);
/// Head and tail of `c` without checking that it is intrinsic.
IntrinsicSet describe_set(const Cadmg& g, VertexSet c);

/// Smallest intrinsic superset of a bidirected-connected set `s`, found by
/// alternating district and ancestor restriction until nothing changes.
/// Throws std::invalid_argument if `s` is not bidirected-connected.
IntrinsicSet intrinsic_closure(const Cadmg& g, VertexSet s);
bool is_intrinsic(const Cadmg& g, VertexSet s);

/// I(G), indexed by members and by head.
class IntrinsicSets {
 public:
  IntrinsicSets() = default;
  /// Throws StructuralError if two sets share a head.
  explicit IntrinsicSets(std::vector<IntrinsicSet> sets);

  const std::vector<IntrinsicSet>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  auto begin() const { return sets_.begin(); }
  auto end() const { return sets_.end(); }

  bool contains(VertexSet members) const { return by_members_.count(members) != 0; }
  const IntrinsicSet* find(VertexSet members) const;
  const IntrinsicSet* find_by_head(VertexSet head) const;
  /// True iff every member of this collection is also in `other`.
  bool subset_of(const IntrinsicSets& other) const;

 private:
  std::vector<IntrinsicSet> sets_;
  std::unordered_map<VertexSet, std::size_t> by_members_;
  std::unordered_map<VertexSet, std::size_t> by_head_;
};

/// Saturation: closures of singletons, then closures of unions with
/// neighbouring singleton closures until no new set appears.
IntrinsicSets all_intrinsic_sets(const Cadmg& g);
/// Every subset of the random vertices tested with is_intrinsic.  Meant for
/// graphs of at most ~16 random vertices.
IntrinsicSets all_intrinsic_sets_exhaustive(const Cadmg& g);

/// Recursive head partition of B (B a subset of the random vertices).
std::vector<VertexSet> head_partition(const IntrinsicSets& sets, VertexSet b);

/// Intrinsic sets of the projection of G onto V \ {x} having x as a parent in
/// G; heads and tails are those of the projection.
std::vector<IntrinsicSet> heads_with_parent(const Cadmg& g, VertexId x);

}  // namespace admg
