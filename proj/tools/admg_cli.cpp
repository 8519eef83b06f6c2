#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "admg/eid.hpp"
#include "admg/errors.hpp"
#include "admg/graph_io.hpp"
#include "admg/identification.hpp"
#include "admg/intrinsic.hpp"
#include "admg/moebius.hpp"
#include "admg/oracle.hpp"

using namespace admg;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kNotIdentifiable = 1, kUsage = 2, kViolation = 3 };

struct RunConfig {
  std::string graph_path;
  std::string params_path;
  std::vector<std::string> do_terms;
  std::vector<std::string> on_terms;
  std::vector<std::string> given_terms;
  std::vector<std::string> keep_terms;
  std::string order = "greedy";
  std::string output = "human";
  std::string check = "eid";
  bool trace = false;
  bool table = false;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  int observed = 6;
  int latent = 3;
  int queries = 20;
  int latent_cardinality = 2;
  double density = 0.4;
  std::string write_graph;
  std::string write_params;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

bool json_lines(const RunConfig& c) { return c.output == "json-lines"; }

/// Splits repeated and comma-separated terms.
std::vector<std::string> split_terms(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& r : raw) {
    std::stringstream ss(r);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

struct Terms {
  VertexSet vars;
  Assignment values;  // only the terms that carried "=v"
};

Terms resolve(const Cadmg& g, const std::vector<std::string>& raw, bool need_values) {
  Terms t;
  for (const auto& term : split_terms(raw)) {
    const auto eq = term.find('=');
    const std::string label = term.substr(0, eq);
    const VertexId v = g.id(label);
    if (t.vars.contains(v)) throw UsageError("vertex listed twice: " + label);
    t.vars.insert(v);
    if (eq == std::string::npos) {
      if (need_values) throw UsageError("expected " + label + "=0 or " + label + "=1");
      continue;
    }
    const std::string val = term.substr(eq + 1);
    if (val != "0" && val != "1") throw UsageError("binary value expected in '" + term + "'");
    t.values.set(v, val == "1" ? 1 : 0);
  }
  return t;
}

Cadmg load_graph(const std::string& path) {
  if (path.empty()) throw UsageError("--graph is required");
  const std::string text = read_text_file(path);
  try {
    if (declares_latents(text)) return latent_projection(parse_latent_dag(text));
    return parse_graph(text);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + std::string(e.what()));
  }
}

QParamSet load_params(const Cadmg& g, const std::string& path) {
  if (path.empty()) throw UsageError("--params is required");
  try {
    return parse_params(g, read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + std::string(e.what()));
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

json labels_json(const Cadmg& g, VertexSet s) { return g.labels(s); }

json assignment_json(const Cadmg& g, const Assignment& a) {
  json out = json::object();
  for (VertexId v : a.domain) out[g.label(v)] = a.value(v);
  return out;
}

std::string assignment_text(const Cadmg& g, const Assignment& a) {
  std::string out;
  for (VertexId v : a.domain) {
    if (!out.empty()) out += ' ';
    out += g.label(v) + '=' + std::to_string(a.value(v));
  }
  return out;
}

std::string width_text(const std::optional<double>& w) {
  if (!w) return "none";
  std::ostringstream s;
  s << *w;
  return s.str();
}

json width_json(const std::optional<double>& w) { return w ? json(*w) : json(nullptr); }

void print_params(const RunConfig& c, const QParamSet& omega) {
  if (!json_lines(c)) {
    std::cout << format_params(omega);
    return;
  }
  const Cadmg& g = omega.graph();
  for (VertexSet head : omega.heads()) {
    const HeadParams& hp = omega.params(head);
    for (std::uint64_t code = 0; code < hp.values.size(); ++code) {
      const Assignment tail{hp.set.tail, unpack(hp.free_tail, code) | (omega.pinned().ones & hp.set.tail)};
      std::cout << json{{"type", "q"}, {"head", labels_json(g, head)}, {"tail", assignment_json(g, tail)},
                        {"value", hp.values[code]}}
                       .dump()
                << '\n';
    }
  }
}

void print_table(const RunConfig& c, const Cadmg& g, const ProbTable& t) {
  for (std::uint64_t code = 0; code < t.size(); ++code) {
    const Assignment a{t.vars(), unpack(t.vars(), code)};
    if (json_lines(c)) {
      std::cout << json{{"type", "p"}, {"values", assignment_json(g, a)}, {"context", assignment_json(g, t.context())},
                        {"p", t.at(code)}}
                       .dump()
                << '\n';
      continue;
    }
    std::cout << "p " << assignment_text(g, a);
    if (!t.context().domain.empty()) std::cout << " | " << assignment_text(g, t.context());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", t.at(code));
    std::cout << " : " << buf << '\n';
  }
}

void print_hedge(const RunConfig& c, const Cadmg& g, const std::optional<HedgeWitness>& h) {
  if (json_lines(c)) {
    json rec{{"type", "not-identifiable"}};
    if (h) {
      rec["roots"] = labels_json(g, h->roots);
      rec["f"] = labels_json(g, h->f);
      rec["f_prime"] = labels_json(g, h->f_prime);
    }
    std::cout << rec.dump() << '\n';
    return;
  }
  std::cout << "NOT IDENTIFIABLE\n";
  if (h) {
    std::cout << "R = " << g.format_set(h->roots) << '\n';
    std::cout << "F = " << g.format_set(h->f) << '\n';
    std::cout << "F' = " << g.format_set(h->f_prime) << '\n';
  }
}

int cmd_intrinsic(const RunConfig& c) {
  const Cadmg g = load_graph(c.graph_path);
  auto sets = all_intrinsic_sets(g);
  std::vector<IntrinsicSet> rows(sets.begin(), sets.end());
  std::sort(rows.begin(), rows.end(),
            [&](const IntrinsicSet& a, const IntrinsicSet& b) { return g.labels(a.members) < g.labels(b.members); });
  for (const auto& s : rows) {
    if (json_lines(c)) {
      std::cout << json{{"type", "intrinsic"}, {"set", labels_json(g, s.members)}, {"head", labels_json(g, s.head)},
                        {"tail", labels_json(g, s.tail)}}
                       .dump()
                << '\n';
    } else {
      std::cout << g.format_set(s.members) << " | " << g.format_set(s.head) << " | " << g.format_set(s.tail) << '\n';
    }
  }
  return kOk;
}

int cmd_identify(const RunConfig& c) {
  const Cadmg g = load_graph(c.graph_path);
  const VertexSet x = resolve(g, c.do_terms, false).vars;
  const VertexSet y = resolve(g, c.on_terms, false).vars;
  const VertexSet z = resolve(g, c.given_terms, false).vars;
  if (y.empty()) throw UsageError("--on is required");
  if (z.empty()) {
    auto r = identify(g, y, x);
    if (!r.identified()) {
      print_hedge(c, g, r.hedge);
      return kNotIdentifiable;
    }
    const std::string expr = format_expr(r.expr, g);
    if (json_lines(c)) {
      std::cout << json{{"type", "expression"}, {"expr", expr}}.dump() << '\n';
    } else {
      std::cout << expr << '\n';
    }
    return kOk;
  }
  auto r = identify_conditional(g, y, z, x);
  if (!r.identified()) {
    print_hedge(c, g, r.hedge);
    return kNotIdentifiable;
  }
  const std::string num = format_expr(r.numerator, g);
  const std::string den = format_expr(r.denominator, g);
  if (json_lines(c)) {
    std::cout << json{{"type", "expression"}, {"numerator", num}, {"denominator", den}}.dump() << '\n';
  } else {
    std::cout << "[" << num << "] / [" << den << "]\n";
  }
  return kOk;
}

OrderStrategy strategy_of(const RunConfig& c) {
  if (c.order == "greedy") return OrderStrategy::kGreedy;
  if (c.order == "exhaustive") return OrderStrategy::kExhaustive;
  throw UsageError("--order must be greedy or exhaustive");
}

void print_trace(const Cadmg& g, const QueryResult& r) {
  for (const auto& s : r.trace) {
    std::cerr << "step " << g.label(s.eliminated) << " width " << width_text(s.width) << " hits " << s.fgmt_hits
              << " misses " << s.fgmt_misses << " seconds " << s.seconds << '\n';
  }
  std::cerr << "order width " << width_text(r.order.width()) << '\n';
}

int cmd_eid(const RunConfig& c) {
  const Cadmg g = load_graph(c.graph_path);
  const QParamSet omega = load_params(g, c.params_path);
  const Terms x = resolve(g, c.do_terms, false);
  const VertexSet y = resolve(g, c.on_terms, false).vars;
  const Terms z = resolve(g, c.given_terms, true);
  if (y.empty()) throw UsageError("--on is required");
  EidOptions opts;
  opts.strategy = strategy_of(c);

  if (!z.vars.empty()) {
    if (x.values.domain != x.vars) throw UsageError("conditional queries need a value for every --do vertex");
    auto res = query_table(omega, y, x.values, z.values, opts);
    if (res.failed) {
      print_hedge(c, g, identify_conditional(g, y, z.vars, x.vars).hedge);
      return kNotIdentifiable;
    }
    print_table(c, g, res.table);
    return kOk;
  }

  auto out = eid(omega, y, x.vars, x.values, opts);
  if (out.failed()) {
    print_hedge(c, g, identify(g, y, x.vars).hedge);
    return kNotIdentifiable;
  }
  if (c.trace) print_trace(g, *out.result);
  print_params(c, out.result->params);
  if (c.table) {
    for (const auto& t : tables_from_params(out.result->params)) print_table(c, g, t);
  }
  return kOk;
}

int cmd_width(const RunConfig& c) {
  const Cadmg g = load_graph(c.graph_path);
  const VertexSet z = resolve(g, c.keep_terms, false).vars;
  if (z.empty()) {
    for (VertexId v : g.random()) {
      const auto w = binary_width_of_vertex(g, v);
      if (json_lines(c)) {
        std::cout << json{{"type", "width"}, {"vertex", g.label(v)}, {"width", width_json(w)}}.dump() << '\n';
      } else {
        std::cout << g.label(v) << ' ' << width_text(w) << '\n';
      }
    }
    return kOk;
  }
  if (!g.random().contains(z)) throw UsageError("--eliminate must name random vertices");
  const auto order = choose_order(g, z, strategy_of(c));
  for (std::size_t i = 0; i < order.order.size(); ++i) {
    if (json_lines(c)) {
      std::cout << json{{"type", "step"}, {"vertex", g.label(order.order[i])}, {"width", width_json(order.widths[i])}}
                       .dump()
                << '\n';
    } else {
      std::cout << g.label(order.order[i]) << ' ' << width_text(order.widths[i]) << '\n';
    }
  }
  if (json_lines(c)) {
    std::cout << json{{"type", "order"}, {"width", width_json(order.width())}}.dump() << '\n';
  } else {
    std::cout << "width " << width_text(order.width()) << '\n';
  }
  return kOk;
}

int cmd_project(const RunConfig& c) {
  if (c.graph_path.empty()) throw UsageError("--graph is required");
  const std::string text = read_text_file(c.graph_path);
  Cadmg out;
  if (declares_latents(text)) {
    out = latent_projection(parse_latent_dag(text));
  } else {
    const Cadmg g = parse_graph(text);
    const VertexSet keep = c.keep_terms.empty() ? g.vertices() : resolve(g, c.keep_terms, false).vars;
    out = latent_projection(g, keep);
  }
  if (json_lines(c)) {
    for (auto [a, b] : out.directed_edges()) {
      std::cout << json{{"type", "directed"}, {"from", out.label(a)}, {"to", out.label(b)}}.dump() << '\n';
    }
    for (auto [a, b] : out.bidirected_edges()) {
      std::cout << json{{"type", "bidirected"}, {"a", out.label(a)}, {"b", out.label(b)}}.dump() << '\n';
    }
  } else {
    std::cout << format_graph(out);
  }
  return kOk;
}

int cmd_table(const RunConfig& c) {
  const Cadmg g = load_graph(c.graph_path);
  const QParamSet omega = load_params(g, c.params_path);
  const VertexSet y = resolve(g, c.on_terms, false).vars;
  for (const auto& t : tables_from_params(omega)) print_table(c, g, y.empty() ? t : t.marginal(y));
  return kOk;
}

int cmd_oracle(const RunConfig& c) {
  if (c.check != "eid" && c.check != "id") throw UsageError("--check must be eid or id");
  if (c.tolerance <= 0) throw UsageError("--tolerance must be positive");
  ModelOptions mo;
  mo.latent_cardinality = c.latent_cardinality;
  const CptModel m = c.graph_path.empty() ? random_model(c.seed, c.observed, c.latent, c.density, mo)
                                          : model_for_graph(load_graph(c.graph_path), c.seed, mo);
  const Cadmg& g = m.projection;
  const QParamSet omega = oracle_q_params(m);
  if (!c.write_graph.empty()) write_file(c.write_graph, format_graph(g));
  if (!c.write_params.empty()) write_file(c.write_params, format_params(omega));

  std::mt19937_64 rng(c.seed);
  const int n = g.random().size();
  int violations = 0;
  for (int i = 0; i < c.queries && n >= 2; ++i) {
    const VertexId y = static_cast<VertexId>(rng() % static_cast<std::uint64_t>(n));
    VertexId x = static_cast<VertexId>(rng() % static_cast<std::uint64_t>(n - 1));
    if (x >= y) ++x;
    Assignment xa;
    xa.set(x, static_cast<int>(rng() % 2));
    const VertexSet ys = VertexSet::single(y);
    const auto id = identify(g, ys, VertexSet::single(x));
    std::string status;
    double residual = 0.0;
    bool bad = false;
    bool identified = false;
    if (c.check == "eid") {
      auto res = query_table(omega, ys, xa);
      identified = !res.failed;
      if (identified != id.identified()) {
        status = "disagree";
        bad = true;
      } else if (identified) {
        residual = res.table.max_abs_diff(effect(m, ys, xa));
      }
    } else if (id.identified()) {
      identified = true;
      const ProbTable p = joint(m);
      const ProbTable truth = effect(m, ys, xa);
      for (std::uint64_t code = 0; code < truth.size(); ++code) {
        const Assignment ya{ys, unpack(ys, code)};
        residual = std::max(residual, std::abs(evaluate_expr(id.expr, p, ya.merged(xa)) - truth.at(code)));
      }
    }
    if (!bad) {
      bad = residual > c.tolerance;
      status = !identified ? "not-identifiable" : (bad ? "violation" : "ok");
    }
    if (bad) ++violations;
    if (json_lines(c)) {
      std::cout << json{{"type", "query"}, {"on", g.label(y)}, {"do", assignment_json(g, xa)}, {"status", status},
                        {"residual", residual}}
                       .dump()
                << '\n';
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3e", residual);
      std::cout << "P(" << g.label(y) << " | do(" << assignment_text(g, xa) << ")) " << status << " residual " << buf
                << '\n';
    }
  }
  if (json_lines(c)) {
    std::cout << json{{"type", "summary"}, {"queries", c.queries}, {"violations", violations}}.dump() << '\n';
  } else {
    std::cout << "violations " << violations << '\n';
  }
  return violations == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identification and computation of interventional distributions in ADMGs"};
  app.require_subcommand(1);
  RunConfig c;

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--output", c.output, "human or json-lines")->check(CLI::IsMember({"human", "json-lines"}));
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--tolerance", c.tolerance, "numerical tolerance");
  };
  auto query = [&](CLI::App* sub) {
    sub->add_option("--do", c.do_terms, "intervened vertices, optionally x=v");
    sub->add_option("--on", c.on_terms, "outcome vertices");
    sub->add_option("--given", c.given_terms, "conditioning vertices");
  };

  auto* intrinsic = app.add_subcommand("intrinsic", "list intrinsic sets as C | head | tail");
  intrinsic->add_option("--graph", c.graph_path)->required();
  shared(intrinsic);

  auto* ident = app.add_subcommand("identify", "symbolic identification");
  ident->add_option("--graph", c.graph_path)->required();
  query(ident);
  shared(ident);

  auto* eid_cmd = app.add_subcommand("eid", "numerical identification from q-parameters");
  eid_cmd->add_option("--graph", c.graph_path)->required();
  eid_cmd->add_option("--params", c.params_path)->required();
  query(eid_cmd);
  eid_cmd->add_option("--order", c.order, "greedy or exhaustive");
  eid_cmd->add_flag("--trace", c.trace, "per-step elimination trace on stderr");
  eid_cmd->add_flag("--table", c.table, "also print the full result table");
  shared(eid_cmd);

  auto* width = app.add_subcommand("width", "binary widths and elimination orders");
  width->add_option("--graph", c.graph_path)->required();
  width->add_option("--eliminate", c.keep_terms, "vertices to eliminate");
  width->add_option("--order", c.order, "greedy or exhaustive");
  shared(width);

  auto* oracle = app.add_subcommand("oracle", "random latent models checked against brute force");
  oracle->add_option("--graph", c.graph_path, "use this ADMG instead of a random structure");
  oracle->add_option("--observed", c.observed);
  oracle->add_option("--latent", c.latent);
  oracle->add_option("--density", c.density);
  oracle->add_option("--latent-cardinality", c.latent_cardinality)->check(CLI::Range(2, 4));
  oracle->add_option("--queries", c.queries);
  oracle->add_option("--check", c.check, "eid or id");
  oracle->add_option("--write-graph", c.write_graph);
  oracle->add_option("--write-params", c.write_params);
  shared(oracle);

  auto* project = app.add_subcommand("project", "latent projection");
  project->add_option("--graph", c.graph_path)->required();
  project->add_option("--keep", c.keep_terms, "vertices to keep");
  shared(project);

  auto* table = app.add_subcommand("table", "joint table from q-parameters");
  table->add_option("--graph", c.graph_path)->required();
  table->add_option("--params", c.params_path)->required();
  table->add_option("--on", c.on_terms, "marginalize onto these vertices");
  shared(table);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*intrinsic) return cmd_intrinsic(c);
    if (*ident) return cmd_identify(c);
    if (*eid_cmd) return cmd_eid(c);
    if (*width) return cmd_width(c);
    if (*oracle) return cmd_oracle(c);
    if (*project) return cmd_project(c);
    if (*table) return cmd_table(c);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
