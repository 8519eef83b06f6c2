#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "admg/graph.hpp"
#include "admg/intrinsic.hpp"

namespace admg {

inline constexpr double kTolerance = 1e-10;
inline constexpr double kClampTolerance = 1e-12;

/// Explicit distribution over binary assignments of `vars`, given a fixed
/// assignment of the context vertices.  Entry i holds the probability of the
/// assignment unpack(vars, i).
class ProbTable {
 public:
  ProbTable() = default;
  ProbTable(UniversePtr universe, VertexSet vars, Assignment context, std::vector<double> values);

  const Universe& universe() const { return *universe_; }
  const UniversePtr& universe_ptr() const { return universe_; }
  VertexSet vars() const { return vars_; }
  const Assignment& context() const { return context_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Probability of the full assignment of `vars` read from `a`.
  double operator()(const Assignment& a) const { return values_[pack(vars_, a.ones)]; }
  double at(std::uint64_t code) const { return values_[code]; }
  /// Marginal probability of a partial assignment (domain within vars).
  double probability(const Assignment& partial) const;
  ProbTable marginal(VertexSet keep) const;
  double total() const;
  /// Entries in [-1e-12, 0) are clamped to 0; anything lower, or a total off
  /// by more than `tol`, raises NumericalError.
  void validate(double tol = kClampTolerance);

  /// Largest absolute entry-wise difference; tables must share vars.
  double max_abs_diff(const ProbTable& other) const;

 private:
  UniversePtr universe_;
  VertexSet vars_;
  Assignment context_;
  std::vector<double> values_;
};

/// Parameter table of one recursive head: q_H(t) for every assignment t of
/// the tail vertices that are not pinned.
struct HeadParams {
  IntrinsicSet set;
  VertexSet free_tail;
  std::vector<double> values;
};

/// Binary q-parameters of a CADMG: one table per recursive head.  Context
/// vertices may be pinned to fixed values, in which case tables only cover
/// tail assignments agreeing with the pins.
class QParamSet {
 public:
  QParamSet() = default;
  /// All entries start as NaN (unset).
  QParamSet(Cadmg graph, Assignment pinned = {});
  QParamSet(Cadmg graph, IntrinsicSets sets, Assignment pinned);

  const Cadmg& graph() const { return graph_; }
  const IntrinsicSets& intrinsic_sets() const { return sets_; }
  const Assignment& pinned() const { return pinned_; }
  /// Heads in intrinsic-set order.
  std::vector<VertexSet> heads() const;
  const HeadParams& params(VertexSet head) const;
  bool has_head(VertexSet head) const { return by_head_.count(head) != 0; }

  /// q_H(mu(tail(H))).  Throws ParameterError for unknown heads, unset
  /// entries, or mu disagreeing with a pinned value.
  double q(VertexSet head, const Assignment& mu) const;
  void set(VertexSet head, const Assignment& tail_values, double value);
  void set_code(VertexSet head, std::uint64_t code, double value);

  /// Number of stored entries: sum over heads of 2^|free tail|.
  std::size_t entry_count() const;
  /// Every entry is set and lies in [0, 1].
  bool complete() const;
  void require_complete() const;

 private:
  Cadmg graph_;
  IntrinsicSets sets_;
  Assignment pinned_;
  std::vector<HeadParams> params_;
  std::unordered_map<VertexSet, std::size_t> by_head_;
};

/// Sum over heads of 2^|tail|.
std::size_t q_count(const Cadmg& g);
std::size_t q_count(const IntrinsicSets& sets);

/// Alternating-sum transform p(X_V = nu(V) | X_W = nu(W)) evaluated term by
/// term over every B between nu^{-1}(0) and V.  `g` is the host graph of
/// `omega` or a sub-CADMG G[R] of it.
double gmt(const Cadmg& g, const QParamSet& omega, const Assignment& nu);

/// Memoized recursive transform.  One instance serves any number of queries
/// against sub-CADMGs G[R] of the base graph; the memo lives as long as the
/// instance.
class Fgmt {
 public:
  struct Stats {
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t entries = 0;
  };

  Fgmt(const Cadmg& base, const QParamSet& omega);

  /// p(X_R = mu(R) | X_{Pa(R)\R} = mu) in the base graph restricted to G[R].
  double operator()(VertexSet random, const Assignment& mu);
  double operator()(const Assignment& mu) { return (*this)(base_.random(), mu); }
  Stats stats() const { return stats_; }

 private:
  struct Key {
    std::uint64_t random;
    std::uint64_t ones;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.random * 0x9E3779B97F4A7C15ULL ^ k.ones);
    }
  };

  double eval(VertexSet random, std::uint64_t ones);
  double single_district(VertexSet d, std::uint64_t ones);

  const Cadmg& base_;
  const QParamSet& omega_;
  std::vector<int> rank_;
  std::unordered_map<Key, double, KeyHash> memo_;
  Stats stats_;
};

/// FGMT applied to a single assignment with a fresh memo.
double fgmt(const Cadmg& g, const QParamSet& omega, const Assignment& mu, Fgmt::Stats* stats = nullptr);

/// Full table of the distribution represented by `omega` for one context
/// assignment (pins and `context` together must cover every context vertex).
ProbTable table_from_params(const QParamSet& omega, const Assignment& context = {},
                            Fgmt::Stats* stats = nullptr);
/// One table per assignment of the unpinned context vertices, in code order.
std::vector<ProbTable> tables_from_params(const QParamSet& omega);

/// q-parameters of a table that recursively factorizes according to `g`.
/// Each intrinsic kernel is obtained by alternating ancestral marginalization
/// and district factorization of the joint.  Context vertices of `g` are
/// pinned to the table's context assignment.
QParamSet params_from_table(const Cadmg& g, const ProbTable& p);

/// Omega(V* | x): parameters of G[V*] taken from `omega`, with the members of
/// `x` pinned wherever they appear in tails.
QParamSet restrict_params(const QParamSet& omega, VertexSet v_star, const Assignment& x);

/// Text form, one entry per line: `q {a,b} | c=0 d=1 : 0.25`.
std::string format_params(const QParamSet& omega);
/// Loads a complete parameter set for `g`; throws ParseError / ParameterError.
QParamSet parse_params(const Cadmg& g, std::string_view text);

}  // namespace admg
