#include "admg/eid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace admg {

namespace {

VertexSet spouse_components_containing(const Cadmg& g, VertexId start, VertexSet within) {
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

std::vector<VertexSet> components(const Cadmg& g, VertexSet within) {
  std::vector<VertexSet> out;
  VertexSet rest = within;
  while (!rest.empty()) {
    VertexSet d = spouse_components_containing(g, rest.first(), within);
    out.push_back(d);
    rest -= d;
  }
  return out;
}

std::vector<std::uint64_t> codes_by_popcount(int bits) {
  std::vector<std::uint64_t> codes(std::size_t{1} << bits);
  std::iota(codes.begin(), codes.end(), std::uint64_t{0});
  std::stable_sort(codes.begin(), codes.end(),
                   [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
  return codes;
}

}  // namespace

QParamSet sum_one(const QParamSet& q, VertexId x, SumOneStats* stats) {
  const Cadmg& g = q.graph();
  if (!g.random().contains(x)) throw std::invalid_argument("sum_one: vertex is not random");
  const Cadmg projected = project_out(g, x);
  QParamSet out(projected, all_intrinsic_sets(projected), q.pinned());
  Fgmt transform(g, q);
  SumOneStats local;

  for (const auto& s : out.intrinsic_sets()) {
    if (!g.parents(s.members).contains(x)) {
      const HeadParams& src = q.params(s.head);
      if (src.set.members != s.members || src.set.tail != s.tail) {
        throw StructuralError("carried-over head " + g.format_set(s.head) + " changed its intrinsic set");
      }
      for (std::uint64_t code = 0; code < src.values.size(); ++code) out.set_code(s.head, code, src.values[code]);
      ++local.carried_heads;
      continue;
    }
    ++local.recomputed_heads;
    const VertexSet joint = s.members | VertexSet::single(x);
    const auto num_parts = components(g, joint);
    const auto den_parts = components(g, joint - s.head);
    for (VertexSet d : num_parts) {
      if (!is_intrinsic(g, d)) {
        throw StructuralError("district " + g.format_set(d) + " of G[I u {x}] is not intrinsic");
      }
    }
    const HeadParams& hp = out.params(s.head);
    for (std::uint64_t code : codes_by_popcount(hp.free_tail.size())) {
      const VertexSet tail_ones = unpack(hp.free_tail, code) | (q.pinned().ones & s.tail);
      double num = 0.0;
      double den = 0.0;
      for (int xv = 0; xv < 2; ++xv) {
        const VertexSet ones = xv != 0 ? tail_ones | VertexSet::single(x) : tail_ones;
        const Assignment nu{s.head | s.tail | VertexSet::single(x) | q.pinned().domain, ones | q.pinned().ones};
        double pn = 1.0;
        for (VertexSet d : num_parts) pn *= transform(d, nu);
        double pd = 1.0;
        for (VertexSet d : den_parts) pd *= transform(d, nu);
        num += pn;
        den += pd;
      }
      if (!(den > 0.0)) {
        throw NumericalError("positivity violation: zero denominator for head " + g.format_set(s.head) + " with tail " +
                             g.format_set(tail_ones & s.tail) + " set to 1");
      }
      double value = num / den;
      if (value < -1e-9 || value > 1.0 + 1e-9) {
        throw NumericalError("recomputed parameter outside [0,1] for head " + g.format_set(s.head));
      }
      out.set_code(s.head, code, std::clamp(value, 0.0, 1.0));
    }
  }
  if (stats != nullptr) {
    const auto fs = transform.stats();
    local.fgmt_hits = fs.hits;
    local.fgmt_misses = fs.misses;
    *stats = local;
  }
  return out;
}

std::optional<double> binary_width_of_vertex(const Cadmg& g, VertexId x) {
  const auto sets = heads_with_parent(g, x);
  if (sets.empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& s : sets) total += std::ldexp(1.0, s.tail.size());
  return std::log2(total);
}

std::optional<double> EliminationOrder::width() const {
  std::optional<double> out;
  for (const auto& w : widths) {
    if (w && (!out || *w > *out)) out = w;
  }
  return out;
}

EliminationOrder evaluate_order(const Cadmg& g, const std::vector<VertexId>& order) {
  EliminationOrder out;
  Cadmg current = g;
  for (VertexId v : order) {
    out.order.push_back(v);
    out.widths.push_back(binary_width_of_vertex(current, v));
    current = project_out(current, v);
  }
  return out;
}

namespace {

double width_or_zero(const std::optional<double>& w) { return w ? std::max(*w, 0.0) : 0.0; }

}  // namespace

EliminationOrder choose_order(const Cadmg& g, VertexSet z, OrderStrategy strategy) {
  if (!g.random().contains(z)) throw std::invalid_argument("choose_order: vertices must be random");
  if (strategy == OrderStrategy::kGreedy) {
    EliminationOrder out;
    Cadmg current = g;
    VertexSet rest = z;
    while (!rest.empty()) {
      VertexId best = -1;
      std::optional<double> best_w;
      for (VertexId v : rest) {
        auto w = binary_width_of_vertex(current, v);
        if (best < 0 || width_or_zero(w) < width_or_zero(best_w)) {
          best = v;
          best_w = w;
        }
      }
      out.order.push_back(best);
      out.widths.push_back(best_w);
      current = project_out(current, best);
      rest.erase(best);
    }
    return out;
  }

  if (z.size() > 10) throw std::invalid_argument("choose_order: exhaustive search limited to 10 vertices");
  // The graph after eliminating a set does not depend on the order, so the
  // optimum is a DP over eliminated subsets.
  const int k = z.size();
  const std::vector<VertexId> zs(z.begin(), z.end());
  const std::size_t n = std::size_t{1} << k;
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> choice(n, -1);
  std::vector<std::vector<double>> step_width(n, std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (std::size_t done = 0; done < n; ++done) {
    Cadmg current = g;
    for (int i = 0; i < k; ++i) {
      if ((done >> i) & 1U) current = project_out(current, zs[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < k; ++i) {
      if (!((done >> i) & 1U)) step_width[done][static_cast<std::size_t>(i)] = width_or_zero(binary_width_of_vertex(current, zs[static_cast<std::size_t>(i)]));
    }
  }
  best[n - 1] = 0.0;
  for (std::size_t done = n - 1; done-- > 0;) {
    for (int i = 0; i < k; ++i) {
      if ((done >> i) & 1U) continue;
      const double w = std::max(step_width[done][static_cast<std::size_t>(i)], best[done | (std::size_t{1} << i)]);
      if (w < best[done]) {
        best[done] = w;
        choice[done] = i;
      }
    }
  }
  std::vector<VertexId> order;
  for (std::size_t done = 0; done != n - 1;) {
    const int i = choice[done];
    order.push_back(zs[static_cast<std::size_t>(i)]);
    done |= std::size_t{1} << i;
  }
  return evaluate_order(g, order);
}

EidOutcome eid(const QParamSet& omega, VertexSet y, VertexSet x, const Assignment& x_values, const EidOptions& opts) {
  const Cadmg& g = omega.graph();
  if (y.empty()) throw std::invalid_argument("eid: outcome set is empty");
  if (y.intersects(x)) throw std::invalid_argument("eid: outcome and intervention sets overlap");
  if (!g.random().contains(y | x)) throw std::invalid_argument("eid: query vertices must be random vertices of the graph");
  if (!x.contains(x_values.domain)) throw std::invalid_argument("eid: values given for non-intervened vertices");

  const VertexSet rest = g.random() - x;
  const Cadmg mutilated = cadmg_restrict(g, rest);
  const VertexSet v_star = ancestors(mutilated, y) & rest;
  const Cadmg sub = cadmg_restrict(g, v_star);
  const IntrinsicSets sub_sets = all_intrinsic_sets(sub);
  if (!sub_sets.subset_of(omega.intrinsic_sets())) return {};

  QueryResult r;
  r.v_star = v_star;
  r.restricted = restrict_params(omega, v_star, x_values);
  r.order = choose_order(r.restricted.graph(), v_star - y, opts.strategy);
  QParamSet current = r.restricted;
  for (std::size_t i = 0; i < r.order.order.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    SumOneStats st;
    current = sum_one(current, r.order.order[i], &st);
    StepTrace step;
    step.eliminated = r.order.order[i];
    step.width = r.order.widths[i];
    step.fgmt_hits = st.fgmt_hits;
    step.fgmt_misses = st.fgmt_misses;
    step.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.trace.push_back(step);
  }
  r.params = std::move(current);
  return EidOutcome{std::move(r)};
}

QueryTable query_table(const QParamSet& omega, VertexSet y, const Assignment& x, const Assignment& z,
                       const EidOptions& opts) {
  if (y.intersects(z.domain) || x.domain.intersects(z.domain)) {
    throw std::invalid_argument("query_table: conditioning set overlaps outcome or intervention");
  }
  QueryTable out;
  EidOutcome res = eid(omega, y | z.domain, x.domain, x, opts);
  if (res.failed()) {
    out.failed = true;
    return out;
  }
  const ProbTable joint = table_from_params(res.result->params);
  const Assignment context = x.merged(z);
  if (z.domain.empty()) {
    out.table = ProbTable(joint.universe_ptr(), y, x, joint.values());
    return out;
  }
  const double pz = joint.probability(z);
  if (!(pz > 0.0)) throw NumericalError("conditioning event P(z | do(x)) has probability zero");
  std::vector<double> values(std::size_t{1} << y.size());
  for (std::uint64_t code = 0; code < values.size(); ++code) {
    values[code] = joint.probability(Assignment{y | z.domain, unpack(y, code) | z.ones}) / pz;
  }
  out.table = ProbTable(joint.universe_ptr(), y, context, std::move(values));
  return out;
}

}  // namespace admg
