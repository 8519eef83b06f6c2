#include "admg/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace admg {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxTableVertices = 25;

std::string format_value(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

VertexSet scope_of(const Cadmg& g, VertexSet random) { return random | g.parents(random); }

VertexSet spouse_component(const Cadmg& g, VertexSet start, VertexSet within) {
  VertexSet comp = start;
  VertexSet frontier = start;
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

}  // namespace

// ---------------------------------------------------------------- ProbTable

ProbTable::ProbTable(UniversePtr universe, VertexSet vars, Assignment context, std::vector<double> values)
    : universe_(std::move(universe)), vars_(vars), context_(context), values_(std::move(values)) {
  if (values_.size() != (std::size_t{1} << vars_.size())) throw std::invalid_argument("ProbTable: wrong table size");
  if (vars_.intersects(context_.domain)) throw std::invalid_argument("ProbTable: context overlaps variables");
}

double ProbTable::probability(const Assignment& partial) const {
  if (!vars_.contains(partial.domain)) throw std::invalid_argument("ProbTable::probability: unknown variable");
  const VertexSet free = vars_ - partial.domain;
  const std::uint64_t n = std::uint64_t{1} << free.size();
  double sum = 0.0;
  for (std::uint64_t code = 0; code < n; ++code) {
    sum += values_[pack(vars_, partial.ones | unpack(free, code))];
  }
  return sum;
}

ProbTable ProbTable::marginal(VertexSet keep) const {
  if (!vars_.contains(keep)) throw std::invalid_argument("ProbTable::marginal: unknown variable");
  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  for (std::uint64_t code = 0; code < values_.size(); ++code) {
    out[pack(keep, unpack(vars_, code))] += values_[code];
  }
  return ProbTable(universe_, keep, context_, std::move(out));
}

double ProbTable::total() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum;
}

void ProbTable::validate(double tol) {
  for (double& v : values_) {
    if (std::isnan(v)) throw NumericalError("probability table contains NaN");
    if (v < -kClampTolerance) throw NumericalError("negative probability " + format_value(v));
    if (v < 0.0) v = 0.0;
  }
  const double t = total();
  if (std::abs(t - 1.0) > tol) throw NumericalError("probability table sums to " + format_value(t));
}

double ProbTable::max_abs_diff(const ProbTable& other) const {
  if (other.vars_ != vars_ || other.values_.size() != values_.size()) {
    throw std::invalid_argument("max_abs_diff: tables over different variables");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) d = std::max(d, std::abs(values_[i] - other.values_[i]));
  return d;
}

// ---------------------------------------------------------------- QParamSet

QParamSet::QParamSet(Cadmg graph, Assignment pinned)
    : QParamSet(graph, all_intrinsic_sets(graph), pinned) {}

QParamSet::QParamSet(Cadmg graph, IntrinsicSets sets, Assignment pinned)
    : graph_(std::move(graph)), sets_(std::move(sets)), pinned_(pinned) {
  if (!graph_.context().contains(pinned_.domain)) throw std::invalid_argument("QParamSet: only context vertices can be pinned");
  for (const auto& s : sets_) {
    HeadParams hp{s, s.tail - pinned_.domain, {}};
    hp.values.assign(std::size_t{1} << hp.free_tail.size(), kUnset);
    by_head_.emplace(s.head, params_.size());
    params_.push_back(std::move(hp));
  }
}

std::vector<VertexSet> QParamSet::heads() const {
  std::vector<VertexSet> out;
  for (const auto& hp : params_) out.push_back(hp.set.head);
  return out;
}

const HeadParams& QParamSet::params(VertexSet head) const {
  auto it = by_head_.find(head);
  if (it == by_head_.end()) throw ParameterError("no parameters for head " + graph_.format_set(head));
  return params_[it->second];
}

double QParamSet::q(VertexSet head, const Assignment& mu) const {
  const HeadParams& hp = params(head);
  if (!mu.domain.contains(hp.free_tail)) throw ParameterError("tail assignment incomplete for head " + graph_.format_set(head));
  const VertexSet checked = hp.set.tail & pinned_.domain & mu.domain;
  if ((mu.ones & checked) != (pinned_.ones & checked)) {
    throw ParameterError("assignment disagrees with pinned context for head " + graph_.format_set(head));
  }
  const double v = hp.values[pack(hp.free_tail, mu.ones)];
  if (std::isnan(v)) throw ParameterError("unset parameter for head " + graph_.format_set(head));
  return v;
}

void QParamSet::set(VertexSet head, const Assignment& tail_values, double value) {
  const HeadParams& hp = params(head);
  if (!tail_values.domain.contains(hp.free_tail)) throw ParameterError("incomplete tail assignment");
  set_code(head, pack(hp.free_tail, tail_values.ones), value);
}

void QParamSet::set_code(VertexSet head, std::uint64_t code, double value) {
  auto it = by_head_.find(head);
  if (it == by_head_.end()) throw ParameterError("no parameters for head " + graph_.format_set(head));
  auto& values = params_[it->second].values;
  if (code >= values.size()) throw std::out_of_range("QParamSet::set_code");
  values[code] = value;
}

std::size_t QParamSet::entry_count() const {
  std::size_t n = 0;
  for (const auto& hp : params_) n += hp.values.size();
  return n;
}

bool QParamSet::complete() const {
  for (const auto& hp : params_) {
    for (double v : hp.values) {
      if (std::isnan(v) || v < 0.0 || v > 1.0) return false;
    }
  }
  return true;
}

void QParamSet::require_complete() const {
  for (const auto& hp : params_) {
    for (double v : hp.values) {
      if (std::isnan(v)) throw ParameterError("missing parameter for head " + graph_.format_set(hp.set.head));
      if (v < 0.0 || v > 1.0) throw ParameterError("parameter outside [0,1] for head " + graph_.format_set(hp.set.head));
    }
  }
}

std::size_t q_count(const IntrinsicSets& sets) {
  std::size_t n = 0;
  for (const auto& s : sets) n += std::size_t{1} << s.tail.size();
  return n;
}

std::size_t q_count(const Cadmg& g) { return q_count(all_intrinsic_sets(g)); }

// ---------------------------------------------------------------- GMT

namespace {

// Parameters of G[R] looked up in the host set; the intrinsic set behind each
// head must coincide.
void check_heads(const IntrinsicSets& sets, const QParamSet& omega) {
  for (const auto& s : sets) {
    const HeadParams& hp = omega.params(s.head);
    if (hp.set.members != s.members) {
      throw ParameterError("head " + omega.graph().format_set(s.head) + " belongs to a different intrinsic set");
    }
  }
}

}  // namespace

double gmt(const Cadmg& g, const QParamSet& omega, const Assignment& nu) {
  const bool same = g.random() == omega.graph().random() && g.universe_ptr() == omega.graph().universe_ptr();
  const IntrinsicSets local = same ? IntrinsicSets{} : all_intrinsic_sets(g);
  const IntrinsicSets& sets = same ? omega.intrinsic_sets() : local;
  if (!same) check_heads(sets, omega);

  const VertexSet v = g.random();
  if (!nu.domain.contains(v)) throw std::invalid_argument("gmt: assignment does not cover V");
  const VertexSet zeros = nu.zeros(v);
  const VertexSet free = v - zeros;
  const std::uint64_t n = std::uint64_t{1} << free.size();
  double sum = 0.0;
  for (std::uint64_t code = 0; code < n; ++code) {
    const VertexSet extra = unpack(free, code);
    const VertexSet b = zeros | extra;
    double term = 1.0;
    for (VertexSet h : head_partition(sets, b)) term *= omega.q(h, nu);
    sum += (extra.size() % 2 == 0) ? term : -term;
  }
  return sum;
}

// ---------------------------------------------------------------- FGMT

Fgmt::Fgmt(const Cadmg& base, const QParamSet& omega) : base_(base), omega_(omega) {
  rank_.assign(static_cast<std::size_t>(base_.universe().size()), 0);
  int r = 0;
  for (VertexId v : topological_order(base_)) rank_[static_cast<std::size_t>(v)] = r++;
}

double Fgmt::operator()(VertexSet random, const Assignment& mu) {
  if (!base_.random().contains(random)) throw std::invalid_argument("fgmt: vertices outside base graph");
  const VertexSet scope = scope_of(base_, random);
  if (!mu.domain.contains(scope)) throw std::invalid_argument("fgmt: assignment does not cover V and its parents");
  double p = eval(random, mu.ones.bits());
  if (p < -kClampTolerance) throw NumericalError("negative probability " + format_value(p) + ": parameters outside the model");
  return std::max(p, 0.0);
}

double Fgmt::eval(VertexSet random, std::uint64_t ones_bits) {
  if (random.empty()) return 1.0;
  const VertexSet scope = scope_of(base_, random);
  const std::uint64_t ones = ones_bits & scope.bits();
  const Key key{random.bits(), ones};
  if (auto it = memo_.find(key); it != memo_.end()) {
    ++stats_.hits;
    return it->second;
  }
  ++stats_.misses;

  double result = 1.0;
  const VertexSet first = spouse_component(base_, VertexSet::single(random.first()), random);
  if (first == random) {
    result = single_district(random, ones);
  } else {
    VertexSet rest = random;
    while (!rest.empty()) {
      const VertexSet d = spouse_component(base_, VertexSet::single(rest.first()), random);
      result *= eval(d, ones);
      rest -= d;
    }
  }
  memo_.emplace(key, result);
  stats_.entries = memo_.size();
  return result;
}

double Fgmt::single_district(VertexSet d, std::uint64_t ones) {
  const VertexSet head = recursive_head(base_, d);
  const VertexSet ones_set(ones);
  if (!ones_set.intersects(head)) {
    const HeadParams& hp = omega_.params(head);
    if (hp.set.members != d) {
      throw ParameterError("head " + base_.format_set(head) + " belongs to " + base_.format_set(hp.set.members) +
                           ", not " + base_.format_set(d));
    }
    const double q = omega_.q(head, Assignment{scope_of(base_, d), ones_set});
    return eval(d - head, ones) * q;
  }
  VertexId y = -1;
  for (VertexId v : ones_set & head) {
    if (y < 0 || rank_[static_cast<std::size_t>(v)] < rank_[static_cast<std::size_t>(y)]) y = v;
  }
  const double without_y = eval(d - VertexSet::single(y), ones);
  const double y_zero = eval(d, (ones_set - VertexSet::single(y)).bits());
  return without_y - y_zero;
}

double fgmt(const Cadmg& g, const QParamSet& omega, const Assignment& mu, Fgmt::Stats* stats) {
  const Cadmg& base = omega.graph();
  if (g.universe_ptr() != base.universe_ptr() || !base.random().contains(g.random())) {
    throw std::invalid_argument("fgmt: graph is not a sub-CADMG of the parameter graph");
  }
  Fgmt f(base, omega);
  const double p = f(g.random(), mu);
  if (stats != nullptr) *stats = f.stats();
  return p;
}

ProbTable table_from_params(const QParamSet& omega, const Assignment& context, Fgmt::Stats* stats) {
  const Cadmg& g = omega.graph();
  if (g.vertices().size() > kMaxTableVertices) throw std::invalid_argument("table_from_params: too many vertices to enumerate");
  const Assignment ctx = omega.pinned().merged(context.restricted(g.context()));
  if (!ctx.domain.contains(g.context())) throw std::invalid_argument("table_from_params: context vertices unassigned");
  const VertexSet v = g.random();
  Fgmt f(g, omega);
  const std::uint64_t n = std::uint64_t{1} << v.size();
  std::vector<double> values(n);
  for (std::uint64_t code = 0; code < n; ++code) {
    values[code] = f(v, Assignment{v | ctx.domain, unpack(v, code) | ctx.ones});
  }
  if (stats != nullptr) *stats = f.stats();
  ProbTable t(g.universe_ptr(), v, ctx, std::move(values));
  t.validate(kTolerance);
  return t;
}

std::vector<ProbTable> tables_from_params(const QParamSet& omega) {
  const VertexSet free = omega.graph().context() - omega.pinned().domain;
  std::vector<ProbTable> out;
  const std::uint64_t n = std::uint64_t{1} << free.size();
  for (std::uint64_t code = 0; code < n; ++code) {
    out.push_back(table_from_params(omega, Assignment{free, unpack(free, code)}));
  }
  return out;
}

// ---------------------------------------------------------------- inverse

namespace {

// Dense function over binary assignments of `scope`.
struct Dense {
  VertexSet scope;
  std::vector<double> values;

  double at(VertexSet ones) const { return values[pack(scope, ones)]; }
};

Dense sum_out(const Dense& k, VertexSet remove) {
  const VertexSet keep = k.scope - remove;
  Dense out{keep, std::vector<double>(std::size_t{1} << keep.size(), 0.0)};
  for (std::uint64_t code = 0; code < k.values.size(); ++code) {
    out.values[pack(keep, unpack(k.scope, code))] += k.values[code];
  }
  return out;
}

// Kernel of intrinsic set c: alternately marginalize to the ancestors of c and
// factor out the district of c, starting from the joint over V.
Dense intrinsic_kernel(const Cadmg& g, const std::vector<VertexId>& order, const ProbTable& p, VertexSet c) {
  Dense k{p.vars(), p.values()};
  VertexSet live = g.random();
  while (true) {
    const VertexSet an = ancestors_within(g, c, live);
    if (an != live) {
      k = sum_out(k, live - an);
      live = an;
    }
    const VertexSet dist = spouse_component(g, c, live);
    if (dist == live) break;

    // Prefix marginals along the topological order of `live`.
    std::vector<VertexId> seq;
    for (VertexId v : order) {
      if (live.contains(v)) seq.push_back(v);
    }
    std::vector<Dense> prefix(seq.size() + 1);
    prefix[seq.size()] = k;
    for (std::size_t i = seq.size(); i-- > 0;) prefix[i] = sum_out(prefix[i + 1], VertexSet::single(seq[i]));
    Dense next{k.scope, std::vector<double>(k.values.size(), 1.0)};
    for (std::uint64_t code = 0; code < next.values.size(); ++code) {
      const VertexSet ones = unpack(k.scope, code);
      double value = 1.0;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!dist.contains(seq[i])) continue;
        const double den = prefix[i].at(ones);
        if (den <= 0.0) throw NumericalError("zero-probability conditioning event while factoring a district");
        value *= prefix[i + 1].at(ones) / den;
      }
      next.values[code] = value;
    }
    k = std::move(next);
    live = dist;
  }
  if (live != c) throw StructuralError("set " + g.format_set(c) + " is not intrinsic");
  return k;
}

}  // namespace

QParamSet params_from_table(const Cadmg& g, const ProbTable& p) {
  if (p.universe().labels() != g.universe().labels()) throw std::invalid_argument("params_from_table: universe mismatch");
  if (p.vars() != g.random()) throw std::invalid_argument("params_from_table: table must cover exactly the random vertices");
  if (!p.context().domain.contains(g.context())) throw std::invalid_argument("params_from_table: context unassigned");
  const Assignment pinned = p.context().restricted(g.context());
  QParamSet omega(g, pinned);
  const auto order = topological_order(g);
  for (const auto& s : omega.intrinsic_sets()) {
    const Dense k = intrinsic_kernel(g, order, p, s.members);
    const Dense given = sum_out(k, s.head);
    const HeadParams& hp = omega.params(s.head);
    const VertexSet random_tail = hp.free_tail & g.random();
    for (std::uint64_t code = 0; code < hp.values.size(); ++code) {
      const VertexSet ones = unpack(hp.free_tail, code) & random_tail;
      const double den = given.at(ones & given.scope);
      if (den <= 0.0) {
        throw NumericalError("zero-probability conditioning event for head " + g.format_set(s.head));
      }
      omega.set_code(s.head, code, std::clamp(k.at(ones & k.scope) / den, 0.0, 1.0));
    }
  }
  return omega;
}

QParamSet restrict_params(const QParamSet& omega, VertexSet v_star, const Assignment& x) {
  const Cadmg& g = omega.graph();
  const Cadmg sub = cadmg_restrict(g, v_star);
  IntrinsicSets sets = all_intrinsic_sets(sub);
  const Assignment pinned = omega.pinned().merged(x).restricted(sub.context());
  QParamSet out(sub, sets, pinned);
  for (const auto& s : out.intrinsic_sets()) {
    const IntrinsicSet* src = omega.intrinsic_sets().find_by_head(s.head);
    if (src == nullptr || src->members != s.members) {
      throw ParameterError("head " + g.format_set(s.head) + " of the restricted graph has no matching parameter");
    }
    const HeadParams& hp = out.params(s.head);
    for (std::uint64_t code = 0; code < hp.values.size(); ++code) {
      const Assignment t{s.tail, unpack(hp.free_tail, code) | (pinned.ones & s.tail)};
      out.set_code(s.head, code, omega.q(s.head, t));
    }
  }
  return out;
}

// ---------------------------------------------------------------- text I/O

std::string format_params(const QParamSet& omega) {
  const Cadmg& g = omega.graph();
  std::ostringstream out;
  for (VertexSet head : omega.heads()) {
    const HeadParams& hp = omega.params(head);
    for (std::uint64_t code = 0; code < hp.values.size(); ++code) {
      const VertexSet ones = unpack(hp.free_tail, code) | (omega.pinned().ones & hp.set.tail);
      out << "q " << g.format_set(head);
      if (!hp.set.tail.empty()) {
        out << " |";
        for (VertexId v : hp.set.tail) out << ' ' << g.label(v) << '=' << (ones.contains(v) ? 1 : 0);
      }
      out << " : " << format_value(hp.values[code]) << '\n';
    }
  }
  return out.str();
}

QParamSet parse_params(const Cadmg& g, std::string_view text) {
  QParamSet omega(g);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    const auto open = line.find('{');
    const auto close = line.find('}');
    const auto colon = line.rfind(':');
    std::istringstream lead(line.substr(0, open == std::string::npos ? line.size() : open));
    std::string kw, extra;
    lead >> kw;
    if (kw != "q" || (lead >> extra) || open == std::string::npos || close == std::string::npos || close < open ||
        colon == std::string::npos || colon < close) {
      throw ParseError(line_no, "expected 'q {head} | tail assignments : value'");
    }
    VertexSet head;
    {
      std::string inner = line.substr(open + 1, close - open - 1);
      std::replace(inner.begin(), inner.end(), ',', ' ');
      std::istringstream hs(inner);
      std::string label;
      while (hs >> label) {
        if (!g.universe().has(label) || !g.random().contains(g.universe().id(label))) {
          throw ParseError(line_no, "unknown head vertex '" + label + "'");
        }
        head.insert(g.universe().id(label));
      }
    }
    if (!omega.has_head(head)) throw ParseError(line_no, g.format_set(head) + " is not a recursive head of the graph");
    const HeadParams& hp = omega.params(head);

    std::string middle = line.substr(close + 1, colon - close - 1);
    if (auto bar = middle.find('|'); bar != std::string::npos) {
      if (middle.substr(0, bar).find_first_not_of(" \t") != std::string::npos) throw ParseError(line_no, "unexpected text before '|'");
      middle = middle.substr(bar + 1);
    } else if (middle.find_first_not_of(" \t") != std::string::npos) {
      throw ParseError(line_no, "tail assignments must follow '|'");
    }
    Assignment tail;
    std::istringstream ts(middle);
    std::string item;
    while (ts >> item) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "expected label=value, got '" + item + "'");
      const std::string label = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (!g.universe().has(label)) throw ParseError(line_no, "unknown tail vertex '" + label + "'");
      if (value != "0" && value != "1") throw ParseError(line_no, "tail values must be 0 or 1");
      const VertexId v = g.universe().id(label);
      if (tail.domain.contains(v)) throw ParseError(line_no, "vertex '" + label + "' assigned twice");
      tail.set(v, value == "1" ? 1 : 0);
    }
    if (tail.domain != hp.set.tail) {
      throw ParseError(line_no, "tail of " + g.format_set(head) + " must be " + g.format_set(hp.set.tail));
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      const std::string vs = line.substr(colon + 1);
      value = std::stod(vs, &used);
      if (vs.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad parameter value");
    }
    if (!(value >= 0.0 && value <= 1.0)) throw ParseError(line_no, "parameter value outside [0,1]");
    const std::uint64_t code = pack(hp.free_tail, tail.ones);
    if (!seen.emplace(head.bits(), code).second) throw ParseError(line_no, "duplicate parameter entry");
    omega.set_code(head, code, value);
  }
  if (seen.size() != omega.entry_count()) {
    throw ParameterError("parameter file has " + std::to_string(seen.size()) + " entries, graph needs " +
                         std::to_string(omega.entry_count()));
  }
  return omega;
}

}  // namespace admg
