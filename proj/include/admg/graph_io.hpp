#pragma once

#include <string>
#include <string_view>

#include "admg/graph.hpp"

namespace admg {

// Line-oriented graph text:
//
//   # comment
//   node a b c        optional pre-declaration
//   a -> b            directed edge
//   a <-> b           bidirected edge
//   latent u          latent vertex (latent DAGs only)
//   context w         context vertex (CADMGs)
//
// Errors are ParseError carrying the offending line number.

Cadmg parse_graph(std::string_view text);
LatentDag parse_latent_dag(std::string_view text);

std::string format_graph(const Cadmg& g);
std::string format_latent_dag(const LatentDag& d);

/// True when the text declares at least one latent vertex.
bool declares_latents(std::string_view text);

std::string read_text_file(const std::string& path);

bool is_valid_label(std::string_view label);

}  // namespace admg
