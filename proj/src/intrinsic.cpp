#include "admg/intrinsic.hpp"

#include <algorithm>
#include <stdexcept>

namespace admg {

namespace {

VertexSet spouse_closure(const Cadmg& g, VertexSet s, VertexSet within) {
  VertexSet comp = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next;
    for (VertexId v : frontier) next |= g.spouses(v);
    next = (next & within) - comp;
    comp |= next;
    frontier = next;
  }
  return comp;
}

VertexSet ancestors_within(const Cadmg& g, VertexSet s, VertexSet within) {
  VertexSet out = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next = (g.parents(frontier) & within) - out;
    out |= next;
    frontier = next;
  }
  return out;
}

VertexSet closure_members(const Cadmg& g, VertexSet s) {
  VertexSet current = g.random();
  while (true) {
    VertexSet next = ancestors_within(g, s, spouse_closure(g, s, current));
    if (next == current) return current;
    current = next;
  }
}

}  // namespace

VertexSet recursive_head(const Cadmg& g, VertexSet c) {
  VertexSet head;
  for (VertexId v : c) {
    if (!g.children(v).intersects(c)) head.insert(v);
  }
  return head;
}

IntrinsicSet describe_set(const Cadmg& g, VertexSet c) {
  const VertexSet head = recursive_head(g, c);
  return {c, head, (c - head) | (g.parents(c) - c)};
}

IntrinsicSet intrinsic_closure(const Cadmg& g, VertexSet s) {
  if (!is_bidirected_connected(g, s)) throw std::invalid_argument("intrinsic_closure: set is not bidirected-connected");
  return describe_set(g, closure_members(g, s));
}

bool is_intrinsic(const Cadmg& g, VertexSet s) {
  return is_bidirected_connected(g, s) && closure_members(g, s) == s;
}

IntrinsicSets::IntrinsicSets(std::vector<IntrinsicSet> sets) : sets_(std::move(sets)) {
  std::sort(sets_.begin(), sets_.end(), [](const IntrinsicSet& a, const IntrinsicSet& b) {
    const int sa = a.members.size(), sb = b.members.size();
    return sa != sb ? sa < sb : a.members < b.members;
  });
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (!by_members_.emplace(sets_[i].members, i).second) throw StructuralError("duplicate intrinsic set");
    if (!by_head_.emplace(sets_[i].head, i).second) throw StructuralError("two intrinsic sets share a recursive head");
  }
}

const IntrinsicSet* IntrinsicSets::find(VertexSet members) const {
  auto it = by_members_.find(members);
  return it == by_members_.end() ? nullptr : &sets_[it->second];
}

const IntrinsicSet* IntrinsicSets::find_by_head(VertexSet head) const {
  auto it = by_head_.find(head);
  return it == by_head_.end() ? nullptr : &sets_[it->second];
}

bool IntrinsicSets::subset_of(const IntrinsicSets& other) const {
  return std::all_of(sets_.begin(), sets_.end(), [&](const IntrinsicSet& s) { return other.contains(s.members); });
}

IntrinsicSets all_intrinsic_sets(const Cadmg& g) {
  std::unordered_map<VertexSet, VertexSet> closure_memo;
  auto closure = [&](VertexSet s) {
    auto it = closure_memo.find(s);
    if (it != closure_memo.end()) return it->second;
    VertexSet c = closure_members(g, s);
    closure_memo.emplace(s, c);
    return c;
  };

  std::vector<VertexSet> singles;
  std::vector<VertexSet> found;
  std::unordered_map<VertexSet, bool> known;
  for (VertexId v : g.random()) {
    VertexSet c = closure(VertexSet::single(v));
    singles.push_back(c);
    if (known.emplace(c, true).second) found.push_back(c);
  }
  for (std::size_t i = 0; i < found.size(); ++i) {
    const VertexSet c = found[i];
    VertexSet neighbours;
    for (VertexId v : c) neighbours |= g.spouses(v);
    neighbours = (neighbours & g.random()) - c;
    for (VertexId v : neighbours) {
      const VertexSet u = c | singles[static_cast<std::size_t>((g.random() & VertexSet::first_n(v)).size())];
      VertexSet next = closure(u);
      if (known.emplace(next, true).second) found.push_back(next);
    }
  }
  std::vector<IntrinsicSet> out;
  out.reserve(found.size());
  for (VertexSet c : found) out.push_back(describe_set(g, c));
  return IntrinsicSets(std::move(out));
}

IntrinsicSets all_intrinsic_sets_exhaustive(const Cadmg& g) {
  const VertexSet v = g.random();
  if (v.size() > 20) throw std::invalid_argument("all_intrinsic_sets_exhaustive: graph too large");
  std::vector<IntrinsicSet> out;
  const std::uint64_t n = std::uint64_t{1} << v.size();
  for (std::uint64_t code = 1; code < n; ++code) {
    const VertexSet s = unpack(v, code);
    if (is_intrinsic(g, s)) out.push_back(describe_set(g, s));
  }
  return IntrinsicSets(std::move(out));
}

std::vector<VertexSet> head_partition(const IntrinsicSets& sets, VertexSet b) {
  std::vector<VertexSet> out;
  VertexSet rest = b;
  while (!rest.empty()) {
    std::vector<const IntrinsicSet*> candidates;
    for (const auto& s : sets) {
      if (rest.contains(s.head)) candidates.push_back(&s);
    }
    VertexSet removed;
    for (const IntrinsicSet* c : candidates) {
      const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](const IntrinsicSet* o) {
        return o != c && o->members.contains(c->members);
      });
      if (dominated) continue;
      if (removed.intersects(c->head)) throw StructuralError("maximal recursive heads overlap");
      removed |= c->head;
      out.push_back(c->head);
    }
    if (removed.empty()) throw StructuralError("head partition residue does not shrink");
    rest -= removed;
  }
  return out;
}

std::vector<IntrinsicSet> heads_with_parent(const Cadmg& g, VertexId x) {
  const Cadmg projected = project_out(g, x);
  std::vector<IntrinsicSet> out;
  for (const auto& s : all_intrinsic_sets(projected)) {
    if (g.parents(s.members).contains(x)) out.push_back(s);
  }
  return out;
}

}  // namespace admg
