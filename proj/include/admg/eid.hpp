#pragma once

#include <optional>
#include <vector>

#include "admg/graph.hpp"
#include "admg/intrinsic.hpp"
#include "admg/moebius.hpp"

namespace admg {

struct SumOneStats {
  std::size_t recomputed_heads = 0;
  std::size_t carried_heads = 0;
  std::size_t fgmt_hits = 0;
  std::size_t fgmt_misses = 0;
};

/// Marginalizes the random vertex `x` out of the distribution represented by
/// `q`.  The result lives on the latent projection of q.graph() onto
/// everything but x; parameters of intrinsic sets without x as a parent are
/// copied unchanged, the rest are recomputed as quotients of transformed
/// district kernels.  Throws NumericalError on a zero denominator.
QParamSet sum_one(const QParamSet& q, VertexId x, SumOneStats* stats = nullptr);

/// log2 of the summed tail-table sizes of the heads that gain x as a parent
/// when x is projected out; nullopt when there are none.
std::optional<double> binary_width_of_vertex(const Cadmg& g, VertexId x);

enum class OrderStrategy { kGreedy, kExhaustive };

struct EliminationOrder {
  std::vector<VertexId> order;
  /// Width of each step in the graph left by the previous eliminations.
  std::vector<std::optional<double>> widths;
  /// Maximum over steps; nullopt when no step has a width.
  std::optional<double> width() const;
};

/// Greedy: repeatedly eliminate the vertex of smallest width (no width counts
/// as 0, ties by label).  Exhaustive: minimum-width order over all
/// permutations, |z| <= 10.
EliminationOrder choose_order(const Cadmg& g, VertexSet z, OrderStrategy strategy = OrderStrategy::kGreedy);
/// Widths of a given order.
EliminationOrder evaluate_order(const Cadmg& g, const std::vector<VertexId>& order);

struct StepTrace {
  VertexId eliminated = -1;
  std::optional<double> width;
  std::size_t fgmt_hits = 0;
  std::size_t fgmt_misses = 0;
  double seconds = 0.0;
};

struct QueryResult {
  VertexSet v_star;
  QParamSet restricted;  // parameters after the restriction step
  QParamSet params;      // parameters of the output graph params.graph()
  EliminationOrder order;
  std::vector<StepTrace> trace;
};

struct EidOptions {
  OrderStrategy strategy = OrderStrategy::kGreedy;
};

struct EidOutcome {
  std::optional<QueryResult> result;  // empty on FAIL
  bool failed() const { return !result.has_value(); }
};

/// Parameters of P(y | do(x)).  `x` lists the intervened vertices; the ones
/// present in `x_values.domain` are pinned, the others stay free context.
EidOutcome eid(const QParamSet& omega, VertexSet y, VertexSet x, const Assignment& x_values,
               const EidOptions& opts = {});

struct QueryTable {
  bool failed = false;
  ProbTable table;  // over y; context holds the x and z values
};

/// P(y | z, do(x)) as a table over y, for fixed x and z values (both must be
/// total on their sets).  z may be empty.
QueryTable query_table(const QParamSet& omega, VertexSet y, const Assignment& x, const Assignment& z = {},
                       const EidOptions& opts = {});

}  // namespace admg
