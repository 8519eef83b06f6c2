#include "admg/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace admg {

namespace {

struct GraphText {
  GraphBuilder builder;
  std::vector<std::string> latent;
  std::vector<std::string> context;
  bool has_bidirected = false;
};

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

GraphText parse_text(std::string_view text) {
  GraphText out;
  std::set<std::pair<std::string, std::string>> directed, bidirected;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;

    auto check_label = [&](const std::string& l) {
      if (!is_valid_label(l)) throw ParseError(line_no, "invalid vertex label '" + l + "'");
    };
    const std::string& head = toks[0];
    if (head == "node" || head == "latent" || head == "context") {
      if (toks.size() < 2) throw ParseError(line_no, "'" + head + "' needs at least one label");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        check_label(toks[i]);
        out.builder.add_vertex(toks[i]);
        if (head == "latent") out.latent.push_back(toks[i]);
        if (head == "context") out.context.push_back(toks[i]);
      }
      continue;
    }
    if (toks.size() != 3 || (toks[1] != "->" && toks[1] != "<->")) {
      throw ParseError(line_no, "expected 'a -> b', 'a <-> b' or a declaration");
    }
    check_label(toks[0]);
    check_label(toks[2]);
    if (toks[0] == toks[2]) throw ParseError(line_no, "self-loop at '" + toks[0] + "'");
    if (toks[1] == "->") {
      if (!directed.emplace(toks[0], toks[2]).second) throw ParseError(line_no, "duplicate directed edge");
      out.builder.add_directed(toks[0], toks[2]);
    } else {
      auto key = std::minmax(toks[0], toks[2]);
      if (!bidirected.emplace(key.first, key.second).second) throw ParseError(line_no, "duplicate bidirected edge");
      out.builder.add_bidirected(toks[0], toks[2]);
      out.has_bidirected = true;
    }
  }
  return out;
}

}  // namespace

bool is_valid_label(std::string_view label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
           c == '\'';
  });
}

bool declares_latents(std::string_view text) {
  GraphText t = parse_text(text);
  return !t.latent.empty();
}

Cadmg parse_graph(std::string_view text) {
  GraphText t = parse_text(text);
  if (!t.latent.empty()) throw ParseError(0, "latent vertices are only allowed in latent DAG files");
  for (const auto& c : t.context) t.builder.add_context(c);
  try {
    return t.builder.build();
  } catch (const StructuralError& e) {
    throw ParseError(0, e.what());
  }
}

LatentDag parse_latent_dag(std::string_view text) {
  GraphText t = parse_text(text);
  if (t.has_bidirected) throw ParseError(0, "latent DAG files may not contain bidirected edges");
  if (!t.context.empty()) throw ParseError(0, "latent DAG files may not declare context vertices");
  try {
    Cadmg dag = t.builder.build();
    return LatentDag(dag, dag.set_of(t.latent));
  } catch (const StructuralError& e) {
    throw ParseError(0, e.what());
  }
}

std::string format_graph(const Cadmg& g) {
  std::ostringstream out;
  if (!g.random().empty()) {
    out << "node";
    for (VertexId v : g.random()) out << ' ' << g.label(v);
    out << '\n';
  }
  if (!g.context().empty()) {
    out << "context";
    for (VertexId v : g.context()) out << ' ' << g.label(v);
    out << '\n';
  }
  for (auto [u, v] : g.directed_edges()) out << g.label(u) << " -> " << g.label(v) << '\n';
  for (auto [u, v] : g.bidirected_edges()) out << g.label(u) << " <-> " << g.label(v) << '\n';
  return out.str();
}

std::string format_latent_dag(const LatentDag& d) {
  std::ostringstream out;
  const Cadmg& g = d.dag();
  if (!d.observed().empty()) {
    out << "node";
    for (VertexId v : d.observed()) out << ' ' << g.label(v);
    out << '\n';
  }
  if (!d.latent().empty()) {
    out << "latent";
    for (VertexId v : d.latent()) out << ' ' << g.label(v);
    out << '\n';
  }
  for (auto [u, v] : g.directed_edges()) out << g.label(u) << " -> " << g.label(v) << '\n';
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace admg
