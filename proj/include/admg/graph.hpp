#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "admg/errors.hpp"
#include "admg/vertex_set.hpp"

namespace admg {

/// Label table shared by a graph and everything derived from it.  Labels are
/// stored in lexicographic order, so vertex index order equals label order.
class Universe {
 public:
  explicit Universe(std::vector<std::string> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(VertexId v) const { return labels_.at(static_cast<std::size_t>(v)); }
  const std::vector<std::string>& labels() const { return labels_; }
  VertexId id(std::string_view label) const;
  bool has(std::string_view label) const;
  VertexSet all() const { return VertexSet::first_n(size()); }

 private:
  std::vector<std::string> labels_;
};

using UniversePtr = std::shared_ptr<const Universe>;

/// Conditional acyclic directed mixed graph G(V, W, E).  Context vertices W
/// carry no incoming directed edges and no bidirected edges.  A plain ADMG is
/// a Cadmg with W empty.  Immutable once built.
class Cadmg {
 public:
  Cadmg() = default;
  /// `parents[v]` / `spouses[v]` are indexed by universe id; entries outside
  /// random|context must be empty.  Throws StructuralError on invalid input.
  Cadmg(UniversePtr universe, VertexSet random, VertexSet context, std::vector<VertexSet> parents,
        std::vector<VertexSet> spouses);

  const Universe& universe() const { return *universe_; }
  const UniversePtr& universe_ptr() const { return universe_; }

  VertexSet random() const { return random_; }
  VertexSet context() const { return context_; }
  VertexSet vertices() const { return random_ | context_; }
  bool is_admg() const { return context_.empty(); }

  VertexSet parents(VertexId v) const { return parents_[static_cast<std::size_t>(v)]; }
  VertexSet children(VertexId v) const { return children_[static_cast<std::size_t>(v)]; }
  VertexSet spouses(VertexId v) const { return spouses_[static_cast<std::size_t>(v)]; }
  /// Union of parents of members of `s` (may intersect `s`).
  VertexSet parents(VertexSet s) const;
  VertexSet children(VertexSet s) const;

  bool has_directed(VertexId from, VertexId to) const { return parents(to).contains(from); }
  bool has_bidirected(VertexId a, VertexId b) const { return spouses(a).contains(b); }

  const std::string& label(VertexId v) const { return universe_->label(v); }
  /// Resolves labels against this graph; throws UnknownVertex.
  VertexSet set_of(const std::vector<std::string>& labels) const;
  VertexId id(std::string_view label) const;
  std::vector<std::string> labels(VertexSet s) const;
  /// "{a,b,c}"
  std::string format_set(VertexSet s) const;

  std::vector<std::pair<VertexId, VertexId>> directed_edges() const;
  /// Each unordered pair once, smaller id first.
  std::vector<std::pair<VertexId, VertexId>> bidirected_edges() const;
  int edge_count() const;

  /// Structural equality: same labels in use, same vertex roles, same edges.
  friend bool operator==(const Cadmg& a, const Cadmg& b);

 private:
  UniversePtr universe_;
  VertexSet random_;
  VertexSet context_;
  std::vector<VertexSet> parents_;
  std::vector<VertexSet> children_;
  std::vector<VertexSet> spouses_;
};

using Admg = Cadmg;

/// Incremental construction by label; labels are sorted when built.
class GraphBuilder {
 public:
  GraphBuilder& add_vertex(const std::string& label);
  GraphBuilder& add_context(const std::string& label);
  GraphBuilder& add_directed(const std::string& from, const std::string& to);
  GraphBuilder& add_bidirected(const std::string& a, const std::string& b);
  Cadmg build() const;

 private:
  std::vector<std::string> order_;
  std::vector<std::string> context_;
  std::vector<std::pair<std::string, std::string>> directed_;
  std::vector<std::pair<std::string, std::string>> bidirected_;
};

/// DAG with some vertices marked latent.
class LatentDag {
 public:
  LatentDag() = default;
  LatentDag(Cadmg dag, VertexSet latent);

  const Cadmg& dag() const { return dag_; }
  VertexSet latent() const { return latent_; }
  VertexSet observed() const { return dag_.vertices() - latent_; }

 private:
  Cadmg dag_;
  VertexSet latent_;
};

// Structural queries.  Vertex-set arguments must lie inside the graph;
// violations raise std::invalid_argument.

/// An(S), reflexive, following directed edges over all vertices of G.
VertexSet ancestors(const Cadmg& g, VertexSet s);
/// De(S), reflexive.
VertexSet descendants(const Cadmg& g, VertexSet s);
/// Maximal bidirected-connected subsets of the random vertices, ordered by
/// smallest member.
std::vector<VertexSet> districts(const Cadmg& g);
/// District of G containing the random vertex v.
VertexSet district_of(const Cadmg& g, VertexId v);
/// True iff `s` is non-empty and forms a single district of G_S.
bool is_bidirected_connected(const Cadmg& g, VertexSet s);
/// G[S] = G*(S, Pa(S) \ S, E_S).
Cadmg cadmg_restrict(const Cadmg& g, VertexSet s);
/// G_A: keeps vertices of A with their roles and edges inside A.
Cadmg induced_subgraph(const Cadmg& g, VertexSet a);
/// Latent projection of G onto vertices() \ {x}; x must be random.
Cadmg project_out(const Cadmg& g, VertexId x);
/// Latent projection of G onto `keep` (all context vertices are kept).
Cadmg latent_projection(const Cadmg& g, VertexSet keep);
/// Latent projection of a latent DAG onto observed vertices O, expressed over
/// a fresh universe holding only O.  Throws std::invalid_argument when O
/// holds a latent vertex.
Admg latent_projection(const LatentDag& d, VertexSet observed);
Admg latent_projection(const LatentDag& d);
/// m-separation of X and Y given Z (pairwise disjoint).
bool m_separated(const Cadmg& g, VertexSet x, VertexSet y, VertexSet z);
/// Topological order of all vertices; among available vertices the smallest
/// label goes first.
std::vector<VertexId> topological_order(const Cadmg& g);

}  // namespace admg
