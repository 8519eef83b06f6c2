#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/moebius.hpp"

namespace admg {

enum class ExprKind {
  kJoint,     // P(V) of the observed joint
  kMarginal,  // sum of `dist` over dist.vars \ vars
  kProduct,   // product of children; as a distribution its variables are `vars`
  kFactor,    // dist(target | given)
  kSum,       // sum over `bound` of children[0]
  kFix,       // children[0] with `bound` set to the arbitrary value
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Node of an identification functional.  Every node records the vertices it
/// reads from the enclosing environment in `free`.
struct Expr {
  ExprKind kind;
  VertexSet vars;
  VertexSet bound;
  VertexId target = -1;
  VertexSet given;
  ExprPtr dist;
  std::vector<ExprPtr> children;
  VertexSet free;
};

ExprPtr make_joint(VertexSet v);
ExprPtr make_marginal(ExprPtr dist, VertexSet keep);
ExprPtr make_product(std::vector<ExprPtr> children, VertexSet vars);
ExprPtr make_factor(ExprPtr dist, VertexId target, VertexSet given);
ExprPtr make_sum(VertexSet over, ExprPtr body);
ExprPtr make_fix(VertexSet vars, ExprPtr body);

/// Pair of nested c-forests (F subset of F') certifying that P(Y' | do(X'))
/// is not identifiable.
struct HedgeWitness {
  VertexSet f;
  VertexSet f_prime;
  VertexSet roots;
  VertexSet x_prime;
  VertexSet y_prime;

  bool operator==(const HedgeWitness&) const = default;
};

struct IdResult {
  ExprPtr expr;                       // set on success
  std::optional<HedgeWitness> hedge;  // set on failure
  int district_splits = 0;            // executions of the district-split step
  bool identified() const { return expr != nullptr; }
};

/// Recursive identification of P(y | do(x)) in the ADMG `g`.  The topological
/// order used for conditional factors is topological_order(g).
IdResult identify(const Admg& g, VertexSet y, VertexSet x);

struct EvalOptions {
  /// Value given to vertices intervened on with arbitrary values.
  int arbitrary_value = 0;
};

/// Evaluates `e` against the joint `p` (over all vertices of the graph the
/// expression was built from) with y and x values taken from `values`.
double evaluate_expr(const ExprPtr& e, const ProbTable& p, const Assignment& values, const EvalOptions& opts = {});

std::string format_expr(const ExprPtr& e, const Cadmg& g);

/// Direct check of the c-forest and hedge definitions for `w` in `g`.
bool validate_hedge(const Admg& g, const HedgeWitness& w);
/// Witness extracted from a failed identification, or nothing when the effect
/// is identified.  Throws StructuralError if the witness fails validate_hedge.
std::optional<HedgeWitness> find_hedge(const Admg& g, VertexSet x, VertexSet y);

/// Intrinsic test through identifiability: S is bidirected-connected and
/// P(S | do(Pa(S) \ S)) is identified.
bool is_intrinsic_by_hedge(const Admg& g, VertexSet s);

struct ConditionalIdResult {
  ExprPtr numerator;    // P(y, z | do(x))
  ExprPtr denominator;  // P(z | do(x)); null when z is empty
  std::optional<HedgeWitness> hedge;
  bool identified() const { return numerator != nullptr; }
};

ConditionalIdResult identify_conditional(const Admg& g, VertexSet y, VertexSet z, VertexSet x);
/// Ratio numerator / denominator; NumericalError when P(z | do(x)) is 0.
double evaluate_conditional(const ConditionalIdResult& r, const ProbTable& p, const Assignment& values,
                            const EvalOptions& opts = {});

}  // namespace admg
