#include "admg/identification.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "admg/intrinsic.hpp"

namespace admg {

ExprPtr make_joint(VertexSet v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kJoint;
  e->vars = v;
  e->free = v;
  return e;
}

ExprPtr make_marginal(ExprPtr dist, VertexSet keep) {
  if (!dist->vars.contains(keep)) throw std::invalid_argument("make_marginal: keep outside distribution");
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kMarginal;
  e->vars = keep;
  e->free = dist->free - (dist->vars - keep);
  e->dist = std::move(dist);
  return e;
}

ExprPtr make_product(std::vector<ExprPtr> children, VertexSet vars) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kProduct;
  e->vars = vars;
  for (const auto& c : children) e->free |= c->free;
  e->children = std::move(children);
  return e;
}

ExprPtr make_factor(ExprPtr dist, VertexId target, VertexSet given) {
  if (!dist->vars.contains(target)) throw std::invalid_argument("make_factor: target outside distribution");
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kFactor;
  e->target = target;
  e->given = given;
  e->vars = VertexSet::single(target);
  e->free = (dist->free - (dist->vars - given - VertexSet::single(target))) | given;
  e->dist = std::move(dist);
  return e;
}

ExprPtr make_sum(VertexSet over, ExprPtr body) {
  if (over.empty()) return body;
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kSum;
  e->bound = over;
  e->free = body->free - over;
  e->children.push_back(std::move(body));
  return e;
}

ExprPtr make_fix(VertexSet vars, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kFix;
  e->bound = vars;
  e->vars = body->vars;
  e->free = body->free - vars;
  e->children.push_back(std::move(body));
  return e;
}

// ---------------------------------------------------------------- ID

namespace {

struct IdContext {
  const Admg& top;
  std::vector<int> rank;
  VertexSet y_orig;
  VertexSet x_orig;
  int district_splits = 0;
};

struct Failure {
  HedgeWitness witness;
};

VertexSet predecessors(const IdContext& ctx, VertexId v, VertexSet within) {
  VertexSet out;
  for (VertexId u : within) {
    if (ctx.rank[static_cast<std::size_t>(u)] < ctx.rank[static_cast<std::size_t>(v)]) out.insert(u);
  }
  return out;
}

VertexSet roots_of(const Cadmg& g, VertexSet f) {
  VertexSet out;
  for (VertexId v : f) {
    if (!g.children(v).intersects(f)) out.insert(v);
  }
  return out;
}

ExprPtr id_rec(IdContext& ctx, VertexSet y, VertexSet x, const ExprPtr& p, const Cadmg& g) {
  const VertexSet v = g.random();
  // 1
  if (x.empty()) return make_marginal(p, y);
  // 2
  const VertexSet an = ancestors(g, y);
  if (!(v - an).empty()) return id_rec(ctx, y, x & an, make_marginal(p, an), induced_subgraph(g, an));
  // 3
  const Cadmg without_x = induced_subgraph(g, v - x);
  const VertexSet w = (v - x) - ancestors(without_x, y);
  if (!w.empty()) return make_fix(w, id_rec(ctx, y, x | w, p, g));
  // 4
  const auto parts = districts(without_x);
  if (parts.size() > 1) {
    ++ctx.district_splits;
    std::vector<ExprPtr> terms;
    for (VertexSet s : parts) terms.push_back(id_rec(ctx, s, v - s, p, g));
    return make_sum(v - (y | x), make_product(std::move(terms), v - x));
  }
  const VertexSet s = parts.front();
  const auto whole = districts(g);
  // 5
  if (whole.size() == 1) {
    HedgeWitness hw;
    hw.f_prime = v;
    hw.f = s;
    hw.roots = roots_of(g, s);
    hw.x_prime = ctx.x_orig & v;
    if (hw.x_prime.empty()) hw.x_prime = v - s;
    hw.y_prime = ctx.y_orig;
    throw Failure{hw};
  }
  // 6
  for (VertexSet d : whole) {
    if (d == s) {
      std::vector<ExprPtr> factors;
      for (VertexId vi : s) factors.push_back(make_factor(p, vi, predecessors(ctx, vi, v)));
      return make_sum(s - y, make_product(std::move(factors), s));
    }
  }
  // 7
  for (VertexSet d : whole) {
    if (d.contains(s)) {
      std::vector<ExprPtr> factors;
      for (VertexId vi : d) factors.push_back(make_factor(p, vi, predecessors(ctx, vi, v)));
      return id_rec(ctx, y, x & d, make_product(std::move(factors), d), induced_subgraph(g, d));
    }
  }
  throw StructuralError("identification: district of G[V\\X] not contained in a district of G");
}

}  // namespace

IdResult identify(const Admg& g, VertexSet y, VertexSet x) {
  if (!g.is_admg()) throw std::invalid_argument("identify: expects an ADMG");
  if (y.empty()) throw std::invalid_argument("identify: outcome set is empty");
  if (y.intersects(x)) throw std::invalid_argument("identify: outcome and intervention sets overlap");
  if (!g.random().contains(y | x)) throw std::invalid_argument("identify: vertices outside graph");
  IdContext ctx{g, std::vector<int>(static_cast<std::size_t>(g.universe().size()), 0), y, x, 0};
  int r = 0;
  for (VertexId v : topological_order(g)) ctx.rank[static_cast<std::size_t>(v)] = r++;
  IdResult out;
  try {
    out.expr = id_rec(ctx, y, x, make_joint(g.random()), g);
  } catch (const Failure& f) {
    out.hedge = f.witness;
  }
  out.district_splits = ctx.district_splits;
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

class Evaluator {
 public:
  Evaluator(const ProbTable& p, int arbitrary) : p_(p), arbitrary_(arbitrary) {}

  double eval(const Expr* e, VertexSet ones) {
    const std::uint64_t key_bits = (ones & e->free).bits();
    auto& slot = memo_[e];
    if (auto it = slot.find(key_bits); it != slot.end()) return it->second;
    const double value = compute(e, ones);
    slot.emplace(key_bits, value);
    return value;
  }

 private:
  double sum_over(const Expr* e, VertexSet over, VertexSet ones) {
    const std::uint64_t n = std::uint64_t{1} << over.size();
    double s = 0.0;
    for (std::uint64_t code = 0; code < n; ++code) s += eval(e, (ones - over) | unpack(over, code));
    return s;
  }

  double compute(const Expr* e, VertexSet ones) {
    switch (e->kind) {
      case ExprKind::kJoint:
        return p_.at(pack(p_.vars(), ones));
      case ExprKind::kMarginal:
        return sum_over(e->dist.get(), e->dist->vars - e->vars, ones);
      case ExprKind::kProduct: {
        double prod = 1.0;
        for (const auto& c : e->children) {
          prod *= eval(c.get(), ones);
          if (prod == 0.0) break;
        }
        return prod;
      }
      case ExprKind::kFactor: {
        const Expr* d = e->dist.get();
        const VertexSet rest = d->vars - e->given - VertexSet::single(e->target);
        const double num = sum_over(d, rest, ones);
        const double den = sum_over(d, rest | VertexSet::single(e->target), ones);
        if (den == 0.0) throw NumericalError("conditioning event with zero probability");
        return num / den;
      }
      case ExprKind::kSum:
        return sum_over(e->children.front().get(), e->bound, ones);
      case ExprKind::kFix: {
        const VertexSet fixed = arbitrary_ != 0 ? ones | e->bound : ones - e->bound;
        return eval(e->children.front().get(), fixed);
      }
    }
    return 0.0;
  }

  const ProbTable& p_;
  int arbitrary_;
  std::unordered_map<const Expr*, std::unordered_map<std::uint64_t, double>> memo_;
};

}  // namespace

double evaluate_expr(const ExprPtr& e, const ProbTable& p, const Assignment& values, const EvalOptions& opts) {
  if (!e) throw std::invalid_argument("evaluate_expr: empty expression");
  if (std::abs(p.total() - 1.0) > kTolerance) throw NumericalError("joint distribution is not normalized");
  if (!values.domain.contains(e->free)) throw std::invalid_argument("evaluate_expr: values missing for free variables");
  Evaluator ev(p, opts.arbitrary_value);
  return ev.eval(e.get(), values.ones & values.domain);
}

// ---------------------------------------------------------------- printing

namespace {

std::string list_of(const Cadmg& g, VertexSet s) {
  std::string out;
  for (VertexId v : s) {
    if (!out.empty()) out += ',';
    out += g.label(v);
  }
  return out;
}

std::string format_dist(const ExprPtr& e, const Cadmg& g);

std::string format_node(const ExprPtr& e, const Cadmg& g) {
  switch (e->kind) {
    case ExprKind::kJoint:
      return "P(" + list_of(g, e->vars) + ")";
    case ExprKind::kMarginal:
      if (e->dist->kind == ExprKind::kJoint) return "P(" + list_of(g, e->vars) + ")";
      return "sum_{" + list_of(g, e->dist->vars - e->vars) + "} " + format_dist(e->dist, g);
    case ExprKind::kProduct: {
      std::string out;
      for (const auto& c : e->children) {
        if (!out.empty()) out += " ";
        out += c->kind == ExprKind::kSum ? "[" + format_node(c, g) + "]" : format_node(c, g);
      }
      return out;
    }
    case ExprKind::kFactor: {
      std::string cond = e->given.empty() ? "" : " | " + list_of(g, e->given);
      std::string head = "P";
      if (e->dist->kind == ExprKind::kMarginal && e->dist->dist->kind == ExprKind::kJoint) {
        head = "P";
      } else if (e->dist->kind != ExprKind::kJoint) {
        head = "Q[" + list_of(g, e->dist->vars) + "]";
      }
      return head + "(" + g.label(e->target) + cond + ")";
    }
    case ExprKind::kSum:
      return "sum_{" + list_of(g, e->bound) + "} " + format_node(e->children.front(), g);
    case ExprKind::kFix:
      return "{" + list_of(g, e->bound) + " := arbitrary} " + format_node(e->children.front(), g);
  }
  return "";
}

std::string format_dist(const ExprPtr& e, const Cadmg& g) {
  if (e->kind == ExprKind::kJoint) return format_node(e, g);
  return "(" + format_node(e, g) + ")";
}

// Distributions used as factor sources are printed once as definitions.
void collect_defs(const ExprPtr& e, const Cadmg& g, std::vector<std::string>& defs,
                  std::unordered_map<const Expr*, bool>& seen) {
  if (!e) return;
  if (e->kind == ExprKind::kFactor && e->dist->kind != ExprKind::kJoint &&
      !(e->dist->kind == ExprKind::kMarginal && e->dist->dist->kind == ExprKind::kJoint)) {
    if (seen.emplace(e->dist.get(), true).second) {
      collect_defs(e->dist, g, defs, seen);
      defs.push_back("Q[" + list_of(g, e->dist->vars) + "] = " + format_node(e->dist, g));
    }
    return;
  }
  collect_defs(e->dist, g, defs, seen);
  for (const auto& c : e->children) collect_defs(c, g, defs, seen);
}

}  // namespace

std::string format_expr(const ExprPtr& e, const Cadmg& g) {
  std::vector<std::string> defs;
  std::unordered_map<const Expr*, bool> seen;
  collect_defs(e, g, defs, seen);
  std::string out;
  for (const auto& d : defs) out += "where " + d + "\n";
  return format_node(e, g) + (out.empty() ? "" : "\n" + out.substr(0, out.size() - 1));
}

// ---------------------------------------------------------------- hedges

namespace {

bool reaches_within(const Cadmg& g, VertexSet from_all, VertexSet targets, VertexSet within) {
  // Every vertex of from_all has a directed path into targets inside `within`.
  VertexSet reach = targets & within;
  VertexSet frontier = reach;
  while (!frontier.empty()) {
    VertexSet next = (g.parents(frontier) & within) - reach;
    reach |= next;
    frontier = next;
  }
  return reach.contains(from_all);
}

bool is_c_forest(const Cadmg& g, VertexSet f, VertexSet roots) {
  return f.contains(roots) && !roots.empty() && is_bidirected_connected(g, f) && reaches_within(g, f, roots, f);
}

}  // namespace

bool validate_hedge(const Admg& g, const HedgeWitness& w) {
  if (!(w.f_prime.contains(w.f) && w.f != w.f_prime)) return false;
  if (!is_c_forest(g, w.f, w.roots) || !is_c_forest(g, w.f_prime, w.roots)) return false;
  if (w.x_prime.empty() || !w.x_prime.intersects(w.f_prime) || w.x_prime.intersects(w.f)) return false;
  const Cadmg mutilated = cadmg_restrict(g, g.random() - w.x_prime);
  const VertexSet an_y = ancestors(mutilated, w.y_prime - w.x_prime);
  return an_y.contains(w.roots);
}

std::optional<HedgeWitness> find_hedge(const Admg& g, VertexSet x, VertexSet y) {
  IdResult r = identify(g, y, x);
  if (r.identified()) return std::nullopt;
  if (!validate_hedge(g, *r.hedge)) throw StructuralError("identification produced an invalid hedge witness");
  return r.hedge;
}

bool is_intrinsic_by_hedge(const Admg& g, VertexSet s) {
  if (!is_bidirected_connected(g, s)) return false;
  return identify(g, s, g.parents(s) - s).identified();
}

ConditionalIdResult identify_conditional(const Admg& g, VertexSet y, VertexSet z, VertexSet x) {
  if (y.intersects(z) || y.intersects(x) || z.intersects(x)) {
    throw std::invalid_argument("identify_conditional: sets must be pairwise disjoint");
  }
  ConditionalIdResult out;
  IdResult joint = identify(g, y | z, x);
  if (!joint.identified()) {
    out.hedge = joint.hedge;
    return out;
  }
  if (!z.empty()) {
    IdResult den = identify(g, z, x);
    if (!den.identified()) {
      out.hedge = den.hedge;
      return out;
    }
    out.denominator = den.expr;
  }
  out.numerator = joint.expr;
  return out;
}

double evaluate_conditional(const ConditionalIdResult& r, const ProbTable& p, const Assignment& values,
                            const EvalOptions& opts) {
  if (!r.identified()) throw std::invalid_argument("evaluate_conditional: effect not identified");
  const double num = evaluate_expr(r.numerator, p, values, opts);
  if (!r.denominator) return num;
  const double den = evaluate_expr(r.denominator, p, values, opts);
  if (den == 0.0) throw NumericalError("conditioning event P(z | do(x)) has probability zero");
  return num / den;
}

}  // namespace admg
