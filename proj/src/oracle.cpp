#include "admg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "admg/graph_io.hpp"
#include "admg/intrinsic.hpp"

namespace admg {

namespace {

constexpr std::size_t kMaxConfigurations = std::size_t{1} << 22;

std::size_t parent_configs(const CptModel& m, VertexId v) {
  std::size_t n = 1;
  for (VertexId p : m.dag.dag().parents(v)) n *= static_cast<std::size_t>(m.cardinality[static_cast<std::size_t>(p)]);
  return n;
}

/// Sum of prod_{v not in drop} P(v | pa(v)) over all full configurations,
/// bucketed by the values of `keep` (projection ids, packed).  `drop` also
/// uses projection ids.
std::vector<double> weighted_counts(const CptModel& m, VertexSet drop, VertexSet keep) {
  const Cadmg& d = m.dag.dag();
  const std::vector<VertexId> order = topological_order(d);
  std::size_t total = 1;
  for (VertexId v : order) {
    total *= static_cast<std::size_t>(m.cardinality[static_cast<std::size_t>(v)]);
    if (total > kMaxConfigurations) throw std::length_error("oracle: model too large to enumerate");
  }
  std::vector<bool> dropped(m.cardinality.size(), false);
  for (VertexId o : drop) dropped[static_cast<std::size_t>(m.to_full[static_cast<std::size_t>(o)])] = true;

  std::vector<std::vector<VertexId>> pa(m.cardinality.size());
  for (VertexId v : order) {
    for (VertexId p : d.parents(v)) pa[static_cast<std::size_t>(v)].push_back(p);
  }

  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  if (order.empty()) {
    out[0] = 1.0;
    return out;
  }
  std::vector<int> value(m.cardinality.size(), 0);
  // Depth-first over the topological order so partial products are shared.
  const std::size_t n = order.size();
  std::vector<double> weight(n + 1, 1.0);
  std::size_t depth = 0;
  std::vector<int> next(n, 0);
  while (true) {
    if (depth == n) {
      VertexSet ones;
      for (VertexId o : keep) {
        if (value[static_cast<std::size_t>(m.to_full[static_cast<std::size_t>(o)])] != 0) ones.insert(o);
      }
      out[pack(keep, ones)] += weight[n];
      --depth;
      continue;
    }
    const VertexId v = order[depth];
    const auto vi = static_cast<std::size_t>(v);
    if (next[depth] == m.cardinality[vi]) {
      next[depth] = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    value[vi] = next[depth]++;
    double w = weight[depth];
    if (!dropped[vi]) {
      std::size_t config = 0;
      std::size_t radix = 1;
      for (VertexId p : pa[vi]) {
        config += static_cast<std::size_t>(value[static_cast<std::size_t>(p)]) * radix;
        radix *= static_cast<std::size_t>(m.cardinality[static_cast<std::size_t>(p)]);
      }
      w *= m.prob(v, config, value[vi]);
    }
    weight[depth + 1] = w;
    ++depth;
  }
  return out;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_table(std::mt19937_64& rng, std::size_t configs, int card, double delta) {
  std::vector<double> t;
  t.reserve(configs * static_cast<std::size_t>(card));
  for (std::size_t c = 0; c < configs; ++c) {
    if (card == 2) {
      const double p0 = uniform(rng, delta, 1.0 - delta);
      t.push_back(p0);
      t.push_back(1.0 - p0);
      continue;
    }
    std::vector<double> row(static_cast<std::size_t>(card));
    double s = 0.0;
    for (auto& r : row) {
      r = uniform(rng, delta, 1.0 - delta);
      s += r;
    }
    for (double r : row) t.push_back(r / s);
  }
  return t;
}

std::vector<std::vector<double>> random_tables(const LatentDag& dag, const std::vector<int>& card,
                                               std::mt19937_64& rng, double delta) {
  const Cadmg& d = dag.dag();
  std::vector<std::vector<double>> cpt(card.size());
  for (VertexId v : d.vertices()) {
    std::size_t configs = 1;
    for (VertexId p : d.parents(v)) configs *= static_cast<std::size_t>(card[static_cast<std::size_t>(p)]);
    cpt[static_cast<std::size_t>(v)] = random_table(rng, configs, card[static_cast<std::size_t>(v)], delta);
  }
  return cpt;
}

void check_options(const ModelOptions& opts) {
  if (opts.latent_cardinality < 2 || opts.latent_cardinality > 4) {
    throw std::invalid_argument("latent cardinality must be between 2 and 4");
  }
  if (!(opts.delta > 0.0 && opts.delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5)");
}

}  // namespace

CptModel make_model(LatentDag dag, std::vector<int> cardinality, std::vector<std::vector<double>> cpt) {
  CptModel m;
  m.dag = std::move(dag);
  m.cardinality = std::move(cardinality);
  m.cpt = std::move(cpt);
  const Cadmg& d = m.dag.dag();
  const auto n = static_cast<std::size_t>(d.universe().size());
  if (m.cardinality.size() != n || m.cpt.size() != n) throw std::invalid_argument("model tables do not match the DAG");
  for (VertexId v : d.vertices()) {
    const int card = m.cardinality[static_cast<std::size_t>(v)];
    if (m.dag.observed().contains(v) ? card != 2 : (card < 2 || card > 4)) {
      throw std::invalid_argument("bad cardinality at " + d.label(v));
    }
    const std::size_t configs = parent_configs(m, v);
    const auto& t = m.cpt[static_cast<std::size_t>(v)];
    if (t.size() != configs * static_cast<std::size_t>(card)) throw std::invalid_argument("bad table size at " + d.label(v));
    for (std::size_t c = 0; c < configs; ++c) {
      double s = 0.0;
      for (int k = 0; k < card; ++k) {
        const double p = t[c * static_cast<std::size_t>(card) + static_cast<std::size_t>(k)];
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1] at " + d.label(v));
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("table row does not sum to 1 at " + d.label(v));
    }
  }
  m.projection = latent_projection(m.dag);
  m.to_observed.assign(n, -1);
  m.to_full.assign(static_cast<std::size_t>(m.projection.universe().size()), -1);
  for (VertexId v : m.dag.observed()) {
    const VertexId o = m.projection.id(d.label(v));
    m.to_observed[static_cast<std::size_t>(v)] = o;
    m.to_full[static_cast<std::size_t>(o)] = v;
  }
  return m;
}

CptModel random_model(std::uint64_t seed, int n_observed, int n_latent, double edge_density, const ModelOptions& opts) {
  check_options(opts);
  if (n_observed < 1) throw std::invalid_argument("random_model: need at least one observed vertex");
  if (n_latent > 0 && n_observed < 2) throw std::invalid_argument("random_model: latents need two observed children");
  if (n_observed + n_latent > 20) throw std::invalid_argument("random_model: at most 20 vertices");
  if (!(edge_density >= 0.0 && edge_density <= 1.0)) throw std::invalid_argument("edge density must lie in [0,1]");
  std::mt19937_64 rng(seed);
  GraphBuilder b;
  std::vector<std::string> obs;
  for (int i = 1; i <= n_observed; ++i) {
    obs.push_back("x" + std::to_string(i));
    b.add_vertex(obs.back());
  }
  for (int j = 1; j < n_observed; ++j) {
    for (int i = 0; i < j; ++i) {
      if (uniform(rng, 0.0, 1.0) < edge_density) b.add_directed(obs[static_cast<std::size_t>(i)], obs[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<std::string> lat;
  for (int k = 1; k <= n_latent; ++k) {
    lat.push_back("u" + std::to_string(k));
    b.add_vertex(lat.back());
    std::vector<int> idx(static_cast<std::size_t>(n_observed));
    for (int i = 0; i < n_observed; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    b.add_directed(lat.back(), obs[static_cast<std::size_t>(idx[0])]);
    b.add_directed(lat.back(), obs[static_cast<std::size_t>(idx[1])]);
    for (std::size_t i = 2; i < idx.size(); ++i) {
      if (uniform(rng, 0.0, 1.0) < edge_density / 2.0) b.add_directed(lat.back(), obs[static_cast<std::size_t>(idx[i])]);
    }
  }
  Cadmg d = b.build();
  VertexSet latent = d.set_of(lat);
  LatentDag dag(d, latent);
  std::vector<int> card(static_cast<std::size_t>(d.universe().size()), 2);
  for (VertexId u : latent) card[static_cast<std::size_t>(u)] = opts.latent_cardinality;
  auto cpt = random_tables(dag, card, rng, opts.delta);
  return make_model(std::move(dag), std::move(card), std::move(cpt));
}

CptModel model_for_graph(const Admg& g, std::uint64_t seed, const ModelOptions& opts) {
  check_options(opts);
  if (!g.is_admg()) throw std::invalid_argument("model_for_graph: graph has context vertices");
  std::mt19937_64 rng(seed);
  GraphBuilder b;
  std::vector<std::string> taken = g.labels(g.vertices());
  for (const auto& l : taken) b.add_vertex(l);
  for (auto [from, to] : g.directed_edges()) b.add_directed(g.label(from), g.label(to));
  std::vector<std::string> lat;
  for (auto [a, c] : g.bidirected_edges()) {
    std::string name = "U_" + g.label(a) + "_" + g.label(c);
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "'";
    taken.push_back(name);
    lat.push_back(name);
    b.add_vertex(name);
    b.add_directed(name, g.label(a));
    b.add_directed(name, g.label(c));
  }
  Cadmg d = b.build();
  LatentDag dag(d, d.set_of(lat));
  std::vector<int> card(static_cast<std::size_t>(d.universe().size()), 2);
  for (VertexId u : dag.latent()) card[static_cast<std::size_t>(u)] = opts.latent_cardinality;
  auto cpt = random_tables(dag, card, rng, opts.delta);
  return make_model(std::move(dag), std::move(card), std::move(cpt));
}

ProbTable joint(const CptModel& m) {
  const VertexSet o = m.projection.vertices();
  return ProbTable(m.projection.universe_ptr(), o, {}, weighted_counts(m, {}, o));
}

ProbTable truncated(const CptModel& m, const Assignment& x) {
  const VertexSet o = m.projection.vertices();
  if (!o.contains(x.domain)) throw std::invalid_argument("truncated: intervention outside the observed vertices");
  const VertexSet rest = o - x.domain;
  auto counts = weighted_counts(m, x.domain, o);
  std::vector<double> values(std::size_t{1} << rest.size());
  for (std::uint64_t code = 0; code < values.size(); ++code) {
    values[code] = counts[pack(o, unpack(rest, code) | x.ones)];
  }
  return ProbTable(m.projection.universe_ptr(), rest, x, std::move(values));
}

ProbTable effect(const CptModel& m, VertexSet y, const Assignment& x) {
  if (y.intersects(x.domain)) throw std::invalid_argument("effect: outcome overlaps intervention");
  const VertexSet keep = y | x.domain;
  auto counts = weighted_counts(m, x.domain, keep);
  std::vector<double> values(std::size_t{1} << y.size());
  for (std::uint64_t code = 0; code < values.size(); ++code) {
    values[code] = counts[pack(keep, unpack(y, code) | x.ones)];
  }
  return ProbTable(m.projection.universe_ptr(), y, x, std::move(values));
}

QParamSet oracle_q_params(const CptModel& m, const Admg& g) {
  if (g.universe().labels() != m.projection.universe().labels() || !(g == m.projection)) {
    throw std::invalid_argument("oracle_q_params: graph is not the model's latent projection");
  }
  QParamSet out(g);
  for (const auto& s : out.intrinsic_sets()) {
    const VertexSet fixed = g.parents(s.members) - s.members;
    const VertexSet keep = s.members | fixed;
    auto counts = weighted_counts(m, fixed, keep);
    const HeadParams& hp = out.params(s.head);
    for (std::uint64_t code = 0; code < hp.values.size(); ++code) {
      const VertexSet tail_ones = unpack(hp.free_tail, code);
      double zero = 0.0;
      double all = 0.0;
      for (std::uint64_t h = 0; h < (std::uint64_t{1} << s.head.size()); ++h) {
        const double c = counts[pack(keep, unpack(s.head, h) | tail_ones)];
        all += c;
        if (h == 0) zero = c;
      }
      if (!(all > 0.0)) throw NumericalError("oracle: zero-probability conditioning event for head " + g.format_set(s.head));
      out.set_code(s.head, code, zero / all);
    }
  }
  return out;
}

QParamSet oracle_q_params(const CptModel& m) { return oracle_q_params(m, m.projection); }

std::string format_model(const CptModel& m) {
  std::ostringstream os;
  os << format_latent_dag(m.dag);
  const Cadmg& d = m.dag.dag();
  char buf[32];
  for (VertexId v : topological_order(d)) {
    os << "cpt " << d.label(v) << " |";
    for (VertexId p : d.parents(v)) os << ' ' << d.label(p);
    os << " :";
    for (double p : m.cpt[static_cast<std::size_t>(v)]) {
      std::snprintf(buf, sizeof buf, " %.6g", p);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace admg
