#include <map>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "admg/eid.hpp"
#include "admg/errors.hpp"
#include "admg/graph_io.hpp"
#include "admg/identification.hpp"
#include "admg/intrinsic.hpp"
#include "admg/moebius.hpp"
#include "admg/oracle.hpp"

namespace py = pybind11;
using namespace admg;

namespace {

using Labels = std::vector<std::string>;
using Values = std::map<std::string, int>;

Assignment to_assignment(const Cadmg& g, const Values& values) {
  Assignment a;
  for (const auto& [label, v] : values) {
    if (v != 0 && v != 1) throw std::invalid_argument("binary value expected for " + label);
    a.set(g.id(label), v);
  }
  return a;
}

Values to_values(const Cadmg& g, const Assignment& a) {
  Values out;
  for (VertexId v : a.domain) out[g.label(v)] = a.value(v);
  return out;
}

/// Rows of (values, context, probability).
py::list table_rows(const Cadmg& g, const ProbTable& t) {
  py::list rows;
  for (std::uint64_t code = 0; code < t.size(); ++code) {
    const Assignment a{t.vars(), unpack(t.vars(), code)};
    rows.append(py::make_tuple(to_values(g, a), to_values(g, t.context()), t.at(code)));
  }
  return rows;
}

py::object width_object(const std::optional<double>& w) { return w ? py::object(py::float_(*w)) : py::none(); }

py::dict hedge_dict(const Cadmg& g, const HedgeWitness& h) {
  py::dict d;
  d["roots"] = g.labels(h.roots);
  d["f"] = g.labels(h.f);
  d["f_prime"] = g.labels(h.f_prime);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Identification and computation of interventional distributions in ADMGs";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<UnknownVertex>(m, "UnknownVertex", PyExc_KeyError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Cadmg>(m, "Graph")
      .def(py::init([](const std::string& text) {
             if (declares_latents(text)) return latent_projection(parse_latent_dag(text));
             return parse_graph(text);
           }),
           py::arg("text"))
      .def_property_readonly("vertices", [](const Cadmg& g) { return g.labels(g.random()); })
      .def_property_readonly("context", [](const Cadmg& g) { return g.labels(g.context()); })
      .def_property_readonly("directed_edges",
                             [](const Cadmg& g) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (auto [a, b] : g.directed_edges()) out.emplace_back(g.label(a), g.label(b));
                               return out;
                             })
      .def_property_readonly("bidirected_edges",
                             [](const Cadmg& g) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (auto [a, b] : g.bidirected_edges()) out.emplace_back(g.label(a), g.label(b));
                               return out;
                             })
      .def("districts",
           [](const Cadmg& g) {
             std::vector<Labels> out;
             for (VertexSet d : districts(g)) out.push_back(g.labels(d));
             return out;
           })
      .def("ancestors", [](const Cadmg& g, const Labels& s) { return g.labels(ancestors(g, g.set_of(s))); })
      .def("project", [](const Cadmg& g, const Labels& keep) { return latent_projection(g, g.set_of(keep)); })
      .def("restrict", [](const Cadmg& g, const Labels& keep) { return cadmg_restrict(g, g.set_of(keep)); })
      .def("__str__", [](const Cadmg& g) { return format_graph(g); })
      .def("__eq__", [](const Cadmg& a, const Cadmg& b) { return a == b; });

  m.def(
      "intrinsic_sets",
      [](const Cadmg& g) {
        std::vector<std::tuple<Labels, Labels, Labels>> out;
        for (const auto& s : all_intrinsic_sets(g)) {
          out.emplace_back(g.labels(s.members), g.labels(s.head), g.labels(s.tail));
        }
        std::sort(out.begin(), out.end());
        return out;
      },
      "Every intrinsic set as (members, head, tail).");
  m.def("q_count", [](const Cadmg& g) { return q_count(g); });
  m.def(
      "binary_width",
      [](const Cadmg& g, const std::string& v) { return width_object(binary_width_of_vertex(g, g.id(v))); },
      py::arg("graph"), py::arg("vertex"));

  m.def(
      "identify",
      [](const Cadmg& g, const Labels& on, const Labels& do_, const Labels& given) {
        py::dict out;
        if (given.empty()) {
          auto r = identify(g, g.set_of(on), g.set_of(do_));
          out["identified"] = r.identified();
          out["expression"] = r.identified() ? py::object(py::str(format_expr(r.expr, g))) : py::none();
          out["hedge"] = r.hedge ? py::object(hedge_dict(g, *r.hedge)) : py::none();
          return out;
        }
        auto r = identify_conditional(g, g.set_of(on), g.set_of(given), g.set_of(do_));
        out["identified"] = r.identified();
        out["expression"] = r.identified() ? py::object(py::str("[" + format_expr(r.numerator, g) + "] / [" +
                                                                format_expr(r.denominator, g) + "]"))
                                           : py::none();
        out["hedge"] = r.hedge ? py::object(hedge_dict(g, *r.hedge)) : py::none();
        return out;
      },
      py::arg("graph"), py::arg("on"), py::arg("do") = Labels{}, py::arg("given") = Labels{});

  py::class_<QParamSet>(m, "Params")
      .def(py::init([](const Cadmg& g, const std::string& text) { return parse_params(g, text); }), py::arg("graph"),
           py::arg("text"))
      .def_static("from_table",
                  [](const Cadmg& g, const std::vector<double>& values) {
                    return params_from_table(g, ProbTable(g.universe_ptr(), g.random(), {}, values));
                  })
      .def_property_readonly("graph", &QParamSet::graph)
      .def_property_readonly("entry_count", &QParamSet::entry_count)
      .def("table", [](const QParamSet& q) {
        py::list rows;
        for (const auto& t : tables_from_params(q)) rows += table_rows(q.graph(), t);
        return rows;
      })
      .def("__str__", [](const QParamSet& q) { return format_params(q); });

  m.def(
      "eid",
      [](const QParamSet& omega, const Labels& on, const Labels& do_, const Values& values,
         const std::string& order) -> py::object {
        const Cadmg& g = omega.graph();
        EidOptions opts;
        if (order == "exhaustive") {
          opts.strategy = OrderStrategy::kExhaustive;
        } else if (order != "greedy") {
          throw std::invalid_argument("order must be greedy or exhaustive");
        }
        auto out = eid(omega, g.set_of(on), g.set_of(do_), to_assignment(g, values), opts);
        if (out.failed()) return py::none();
        const auto& r = *out.result;
        py::dict d;
        d["params"] = r.params;
        Labels eliminated;
        py::list widths;
        for (std::size_t i = 0; i < r.order.order.size(); ++i) {
          eliminated.push_back(g.label(r.order.order[i]));
          widths.append(width_object(r.order.widths[i]));
        }
        d["order"] = eliminated;
        d["widths"] = widths;
        d["width"] = width_object(r.order.width());
        return d;
      },
      py::arg("params"), py::arg("on"), py::arg("do") = Labels{}, py::arg("values") = Values{},
      py::arg("order") = "greedy", "Numerical identification; None when the effect is not identifiable.");

  m.def(
      "query",
      [](const QParamSet& omega, const Labels& on, const Values& do_, const Values& given) -> py::object {
        const Cadmg& g = omega.graph();
        auto res = query_table(omega, g.set_of(on), to_assignment(g, do_), to_assignment(g, given));
        if (res.failed) return py::none();
        return table_rows(g, res.table);
      },
      py::arg("params"), py::arg("on"), py::arg("do") = Values{}, py::arg("given") = Values{});

  py::class_<CptModel>(m, "Model")
      .def_property_readonly("graph", [](const CptModel& cm) { return cm.projection; })
      .def("q_params", [](const CptModel& cm) { return oracle_q_params(cm); })
      .def("joint", [](const CptModel& cm) { return table_rows(cm.projection, joint(cm)); })
      .def(
          "effect",
          [](const CptModel& cm, const Labels& on, const Values& do_) {
            const Cadmg& g = cm.projection;
            return table_rows(g, effect(cm, g.set_of(on), to_assignment(g, do_)));
          },
          py::arg("on"), py::arg("do") = Values{})
      .def("__str__", [](const CptModel& cm) { return format_model(cm); });

  m.def(
      "random_model",
      [](std::uint64_t seed, int observed, int latent, double density, int latent_cardinality) {
        ModelOptions o;
        o.latent_cardinality = latent_cardinality;
        return random_model(seed, observed, latent, density, o);
      },
      py::arg("seed") = 0, py::arg("observed") = 5, py::arg("latent") = 2, py::arg("density") = 0.4,
      py::arg("latent_cardinality") = 2);
  m.def(
      "model_for_graph", [](const Cadmg& g, std::uint64_t seed) { return model_for_graph(g, seed); }, py::arg("graph"),
      py::arg("seed") = 0);
}
