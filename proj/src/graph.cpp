#include "admg/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace admg {

namespace {

void require_subset(const Cadmg& g, VertexSet s, const char* what) {
  if (!g.vertices().contains(s)) {
    throw std::invalid_argument(std::string(what) + ": vertex set not contained in graph");
  }
}

}  // namespace

Universe::Universe(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw StructuralError("duplicate vertex label");
  }
  if (labels_.size() > static_cast<std::size_t>(kMaxVertices)) {
    throw StructuralError("graphs are limited to " + std::to_string(kMaxVertices) + " vertices");
  }
  for (const auto& l : labels_) {
    if (l.empty()) throw StructuralError("empty vertex label");
  }
}

VertexId Universe::id(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) throw UnknownVertex(std::string(label));
  return static_cast<VertexId>(it - labels_.begin());
}

bool Universe::has(std::string_view label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

Cadmg::Cadmg(UniversePtr universe, VertexSet random, VertexSet context, std::vector<VertexSet> parents,
             std::vector<VertexSet> spouses)
    : universe_(std::move(universe)),
      random_(random),
      context_(context),
      parents_(std::move(parents)),
      spouses_(std::move(spouses)) {
  const auto n = static_cast<std::size_t>(universe_->size());
  parents_.resize(n);
  spouses_.resize(n);
  children_.assign(n, VertexSet{});
  if (random_.intersects(context_)) throw StructuralError("random and context vertices overlap");
  if (!universe_->all().contains(vertices())) throw StructuralError("vertex outside universe");
  const VertexSet all = vertices();
  for (VertexId v = 0; v < static_cast<VertexId>(n); ++v) {
    const VertexSet pa = parents_[static_cast<std::size_t>(v)];
    const VertexSet sp = spouses_[static_cast<std::size_t>(v)];
    if (!all.contains(v)) {
      if (!pa.empty() || !sp.empty()) throw StructuralError("edge at undeclared vertex " + label(v));
      continue;
    }
    if (!all.contains(pa) || !all.contains(sp)) {
      throw StructuralError("edge endpoint outside graph at " + label(v));
    }
    if (pa.contains(v) || sp.contains(v)) throw StructuralError("self-loop at " + label(v));
    if (context_.contains(v) && (!pa.empty() || !sp.empty())) {
      throw StructuralError("context vertex " + label(v) + " has incoming edges");
    }
    for (VertexId s : sp) {
      if (!spouses_[static_cast<std::size_t>(s)].contains(v)) throw StructuralError("asymmetric bidirected edge");
    }
    for (VertexId p : pa) children_[static_cast<std::size_t>(p)].insert(v);
  }
  // Kahn's algorithm detects directed cycles.
  std::vector<int> indeg(n, 0);
  VertexSet ready;
  for (VertexId v : all) {
    indeg[static_cast<std::size_t>(v)] = this->parents(v).size();
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.insert(v);
  }
  int seen = 0;
  while (!ready.empty()) {
    VertexId v = ready.first();
    ready.erase(v);
    ++seen;
    for (VertexId c : children(v)) {
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.insert(c);
    }
  }
  if (seen != all.size()) throw StructuralError("directed cycle");
}

VertexSet Cadmg::parents(VertexSet s) const {
  VertexSet out;
  for (VertexId v : s) out |= parents(v);
  return out;
}

VertexSet Cadmg::children(VertexSet s) const {
  VertexSet out;
  for (VertexId v : s) out |= children(v);
  return out;
}

VertexId Cadmg::id(std::string_view label) const {
  VertexId v = universe_->id(label);
  if (!vertices().contains(v)) throw UnknownVertex(std::string(label));
  return v;
}

VertexSet Cadmg::set_of(const std::vector<std::string>& labels) const {
  VertexSet out;
  for (const auto& l : labels) out.insert(id(l));
  return out;
}

std::vector<std::string> Cadmg::labels(VertexSet s) const {
  std::vector<std::string> out;
  for (VertexId v : s) out.push_back(label(v));
  return out;
}

std::string Cadmg::format_set(VertexSet s) const {
  std::string out = "{";
  bool first = true;
  for (VertexId v : s) {
    if (!first) out += ',';
    out += label(v);
    first = false;
  }
  return out + "}";
}

std::vector<std::pair<VertexId, VertexId>> Cadmg::directed_edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (VertexId v : vertices()) {
    for (VertexId c : children(v)) out.emplace_back(v, c);
  }
  return out;
}

std::vector<std::pair<VertexId, VertexId>> Cadmg::bidirected_edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (VertexId v : vertices()) {
    for (VertexId s : spouses(v)) {
      if (v < s) out.emplace_back(v, s);
    }
  }
  return out;
}

int Cadmg::edge_count() const {
  return static_cast<int>(directed_edges().size() + bidirected_edges().size());
}

bool operator==(const Cadmg& a, const Cadmg& b) {
  if (a.labels(a.random_) != b.labels(b.random_) || a.labels(a.context_) != b.labels(b.context_)) return false;
  auto named = [](const Cadmg& g, const std::vector<std::pair<VertexId, VertexId>>& edges) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [u, v] : edges) out.emplace_back(g.label(u), g.label(v));
    std::sort(out.begin(), out.end());
    return out;
  };
  return named(a, a.directed_edges()) == named(b, b.directed_edges()) &&
         named(a, a.bidirected_edges()) == named(b, b.bidirected_edges());
}

GraphBuilder& GraphBuilder::add_vertex(const std::string& label) {
  if (std::find(order_.begin(), order_.end(), label) == order_.end()) order_.push_back(label);
  return *this;
}

GraphBuilder& GraphBuilder::add_context(const std::string& label) {
  add_vertex(label);
  if (std::find(context_.begin(), context_.end(), label) == context_.end()) context_.push_back(label);
  return *this;
}

GraphBuilder& GraphBuilder::add_directed(const std::string& from, const std::string& to) {
  add_vertex(from);
  add_vertex(to);
  directed_.emplace_back(from, to);
  return *this;
}

GraphBuilder& GraphBuilder::add_bidirected(const std::string& a, const std::string& b) {
  add_vertex(a);
  add_vertex(b);
  bidirected_.emplace_back(a, b);
  return *this;
}

Cadmg GraphBuilder::build() const {
  auto universe = std::make_shared<const Universe>(order_);
  const auto n = static_cast<std::size_t>(universe->size());
  std::vector<VertexSet> parents(n), spouses(n);
  for (const auto& [from, to] : directed_) {
    parents[static_cast<std::size_t>(universe->id(to))].insert(universe->id(from));
  }
  for (const auto& [a, b] : bidirected_) {
    VertexId u = universe->id(a), v = universe->id(b);
    if (u == v) throw StructuralError("self-loop at " + a);
    spouses[static_cast<std::size_t>(u)].insert(v);
    spouses[static_cast<std::size_t>(v)].insert(u);
  }
  VertexSet context;
  for (const auto& c : context_) context.insert(universe->id(c));
  return Cadmg(universe, universe->all() - context, context, std::move(parents), std::move(spouses));
}

LatentDag::LatentDag(Cadmg dag, VertexSet latent) : dag_(std::move(dag)), latent_(latent) {
  if (!dag_.bidirected_edges().empty()) throw StructuralError("latent DAG may not contain bidirected edges");
  if (!dag_.context().empty()) throw StructuralError("latent DAG may not contain context vertices");
  if (!dag_.vertices().contains(latent_)) throw StructuralError("latent label outside graph");
}

VertexSet ancestors(const Cadmg& g, VertexSet s) {
  require_subset(g, s, "ancestors");
  VertexSet out = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next = g.parents(frontier) - out;
    out |= next;
    frontier = next;
  }
  return out;
}

VertexSet descendants(const Cadmg& g, VertexSet s) {
  require_subset(g, s, "descendants");
  VertexSet out = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next = g.children(frontier) - out;
    out |= next;
    frontier = next;
  }
  return out;
}

namespace {

// Bidirected component of `start` inside `within`.
VertexSet spouse_component(const Cadmg& g, VertexId start, VertexSet within) {
  VertexSet comp = VertexSet::single(start);
  VertexSet frontier = comp;
  while (!frontier.empty()) {
    VertexSet next;
    for (VertexId v : frontier) next |= g.spouses(v);
    next = (next & within) - comp;
    comp |= next;
    frontier = next;
  }
  return comp;
}

}  // namespace

std::vector<VertexSet> districts(const Cadmg& g) {
  std::vector<VertexSet> out;
  VertexSet rest = g.random();
  while (!rest.empty()) {
    VertexSet d = spouse_component(g, rest.first(), g.random());
    out.push_back(d);
    rest -= d;
  }
  return out;
}

VertexSet district_of(const Cadmg& g, VertexId v) {
  if (!g.random().contains(v)) throw std::invalid_argument("district_of: not a random vertex");
  return spouse_component(g, v, g.random());
}

bool is_bidirected_connected(const Cadmg& g, VertexSet s) {
  if (s.empty() || !g.random().contains(s)) return false;
  return spouse_component(g, s.first(), s) == s;
}

Cadmg cadmg_restrict(const Cadmg& g, VertexSet s) {
  if (!g.random().contains(s)) throw std::invalid_argument("cadmg_restrict: set not contained in random vertices");
  const auto n = static_cast<std::size_t>(g.universe().size());
  std::vector<VertexSet> parents(n), spouses(n);
  for (VertexId v : s) {
    parents[static_cast<std::size_t>(v)] = g.parents(v);
    spouses[static_cast<std::size_t>(v)] = g.spouses(v) & s;
  }
  return Cadmg(g.universe_ptr(), s, g.parents(s) - s, std::move(parents), std::move(spouses));
}

Cadmg induced_subgraph(const Cadmg& g, VertexSet a) {
  require_subset(g, a, "induced_subgraph");
  const auto n = static_cast<std::size_t>(g.universe().size());
  std::vector<VertexSet> parents(n), spouses(n);
  for (VertexId v : a) {
    parents[static_cast<std::size_t>(v)] = g.parents(v) & a;
    spouses[static_cast<std::size_t>(v)] = g.spouses(v) & a;
  }
  return Cadmg(g.universe_ptr(), g.random() & a, g.context() & a, std::move(parents), std::move(spouses));
}

Cadmg project_out(const Cadmg& g, VertexId x) {
  if (!g.random().contains(x)) throw std::invalid_argument("project_out: not a random vertex");
  const auto n = static_cast<std::size_t>(g.universe().size());
  std::vector<VertexSet> parents(n), spouses(n);
  const VertexSet keep = g.vertices() - VertexSet::single(x);
  for (VertexId v : keep) {
    parents[static_cast<std::size_t>(v)] = g.parents(v) & keep;
    spouses[static_cast<std::size_t>(v)] = g.spouses(v) & keep;
  }
  const VertexSet pa = g.parents(x);
  const VertexSet ch = g.children(x);
  const VertexSet sp = g.spouses(x);
  for (VertexId c : ch) {
    auto& pc = parents[static_cast<std::size_t>(c)];
    auto& sc = spouses[static_cast<std::size_t>(c)];
    pc |= pa;
    // c <- x -> c' and c <- x <-> s both give c <-> other.
    sc |= (ch | sp) - VertexSet::single(c);
    for (VertexId s : sp - VertexSet::single(c)) spouses[static_cast<std::size_t>(s)].insert(c);
  }
  return Cadmg(g.universe_ptr(), g.random() - VertexSet::single(x), g.context(), std::move(parents),
               std::move(spouses));
}

Cadmg latent_projection(const Cadmg& g, VertexSet keep) {
  require_subset(g, keep, "latent_projection");
  if (!keep.contains(g.context())) throw std::invalid_argument("latent_projection: context vertices must be kept");
  Cadmg out = g;
  for (VertexId x : g.vertices() - keep) out = project_out(out, x);
  return out;
}

Admg latent_projection(const LatentDag& d, VertexSet observed) {
  if (observed.intersects(d.latent())) throw std::invalid_argument("latent_projection: target contains a latent vertex");
  const Cadmg projected = latent_projection(d.dag(), observed);
  GraphBuilder b;
  for (VertexId v : observed) b.add_vertex(projected.label(v));
  for (auto [u, v] : projected.directed_edges()) b.add_directed(projected.label(u), projected.label(v));
  for (auto [u, v] : projected.bidirected_edges()) b.add_bidirected(projected.label(u), projected.label(v));
  return b.build();
}

Admg latent_projection(const LatentDag& d) { return latent_projection(d, d.observed()); }

bool m_separated(const Cadmg& g, VertexSet x, VertexSet y, VertexSet z) {
  require_subset(g, x | y | z, "m_separated");
  if (x.intersects(y) || x.intersects(z) || y.intersects(z)) {
    throw std::invalid_argument("m_separated: sets must be pairwise disjoint");
  }
  const VertexSet an_z = ancestors(g, z);
  // States: (vertex, whether the edge we arrived by has an arrowhead at it).
  VertexSet seen_head, seen_tail;
  std::vector<std::pair<VertexId, bool>> stack;
  auto push = [&](VertexId u, bool head) {
    VertexSet& seen = head ? seen_head : seen_tail;
    if (!seen.contains(u)) {
      seen.insert(u);
      stack.emplace_back(u, head);
    }
  };
  auto expand = [&](VertexId v, bool start, bool arrived_head) {
    auto may_leave = [&](bool leave_head_at_v) {
      if (start) return true;
      const bool collider = arrived_head && leave_head_at_v;
      return collider ? an_z.contains(v) : !z.contains(v);
    };
    if (may_leave(false)) {
      for (VertexId c : g.children(v)) push(c, true);
    }
    if (may_leave(true)) {
      for (VertexId p : g.parents(v)) push(p, false);
      for (VertexId s : g.spouses(v)) push(s, true);
    }
  };
  for (VertexId v : x) expand(v, true, false);
  while (!stack.empty()) {
    auto [v, head] = stack.back();
    stack.pop_back();
    if (y.contains(v)) return false;
    if (x.contains(v)) continue;
    expand(v, false, head);
  }
  return true;
}

std::vector<VertexId> topological_order(const Cadmg& g) {
  std::vector<VertexId> out;
  VertexSet placed;
  VertexSet rest = g.vertices();
  while (!rest.empty()) {
    for (VertexId v : rest) {
      if (placed.contains(g.parents(v))) {
        out.push_back(v);
        placed.insert(v);
        rest.erase(v);
        break;
      }
    }
  }
  return out;
}

}  // namespace admg
