#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/moebius.hpp"

namespace admg {

/// Latent-variable DAG with explicit conditional probability tables.
/// Observed vertices are binary; latents take 2..4 values.  The table of v
/// holds, for each joint value of its parents (ascending id, first parent
/// varying fastest, mixed radix), cardinality(v) probabilities.
struct CptModel {
  LatentDag dag;
  Admg projection;                  // observed ADMG, over its own universe
  std::vector<VertexId> to_observed;  // dag id -> projection id, -1 for latents
  std::vector<VertexId> to_full;      // projection id -> dag id
  std::vector<int> cardinality;
  std::vector<std::vector<double>> cpt;

  /// P(v = value | parent configuration index).
  double prob(VertexId v, std::size_t config, int value) const {
    return cpt[static_cast<std::size_t>(v)][config * static_cast<std::size_t>(cardinality[static_cast<std::size_t>(v)]) +
                                            static_cast<std::size_t>(value)];
  }
};

struct ModelOptions {
  int latent_cardinality = 2;
  double delta = 0.05;
};

/// Builds the model's projection and index maps; checks every table.
CptModel make_model(LatentDag dag, std::vector<int> cardinality, std::vector<std::vector<double>> cpt);

/// Seeded random model: observed x1..xn in topological order with each
/// forward edge present with probability `edge_density`, latents u1..um as
/// roots with at least two observed children each.
CptModel random_model(std::uint64_t seed, int n_observed, int n_latent, double edge_density,
                      const ModelOptions& opts = {});
/// Random tables for a latent DAG realizing `g`: one latent root per
/// bidirected edge.
CptModel model_for_graph(const Admg& g, std::uint64_t seed, const ModelOptions& opts = {});

/// Observed joint, latents summed out.  Table over projection vertices.
ProbTable joint(const CptModel& m);
/// p(V \ X | do(x)) by the truncation formula; `x` uses projection ids.
ProbTable truncated(const CptModel& m, const Assignment& x);
/// Marginal of the truncated distribution over `y`.
ProbTable effect(const CptModel& m, VertexSet y, const Assignment& x);

/// q_H(t) = P(H = 0 | C \ H = t, do(Pa(C) \ C = t)) for every intrinsic set C
/// of `g`, which must match m.projection (same labels and edges).
QParamSet oracle_q_params(const CptModel& m, const Admg& g);
QParamSet oracle_q_params(const CptModel& m);

std::string format_model(const CptModel& m);

}  // namespace admg
