#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "marstab/graph.hpp"
#include "marstab/lp.hpp"
#include "marstab/market.hpp"

namespace marstab {

enum class RegimeKind { Unilateral, MutualConsentNoTransfers, MutualConsentTransfers };

std::string to_string(RegimeKind kind);

/// A divorce regime. Unilateral behaves as an empty committed set regardless
/// of the market's flags; the mutual consent kinds honor the committed set
/// (or the override when present).
struct Regime {
  RegimeKind kind = RegimeKind::Unilateral;
  std::optional<CommittedSet> committed_override;

  CommittedSet effective_committed(const Market& market) const;
};

struct BuildOptions {
  bool with_indices = false;
  int max_path_len = 4;  // 0 means unbounded (small markets only)
  double eps = 1e-7;     // strictness surrogate for the NoTransfers pattern
  std::optional<double> big_m;  // override the per-path interval bound
};

struct SolveSettings {
  BuildOptions build;
  lp::SolveOptions lp;
};

/// Thrown when the NoTransfers regime would enumerate unboundedly long
/// structures on a market too large for that.
struct PathLimitRequired : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexReport {
  std::map<PairKey, double> s;  // per outside option
  double average = 0.0;
  AllocationCandidate candidate;
  lp::Status status = lp::Status::NumericalFailure;
  std::string detail;
};

struct CheckResult {
  bool verdict = false;
  std::optional<AllocationCandidate> witness;
  std::optional<PathOfRemarriages> counterexample;
  lp::Status status = lp::Status::NumericalFailure;
  std::string detail;
};

/// Compiles the regime's rationalizability condition over the unobservables
/// (q_m shares, Lindahl splits Pm, and s indices when requested). q_w and Pw
/// are eliminated through adding-up; assignable data tightens the q_m bounds.
lp::FeasibilityProgram build_program(const Market& market, const Regime& regime,
                                     const BuildOptions& opts = {});

/// Solves max Σ s subject to the regime program. All-ones s means exactly
/// rationalizable. NoTransfers runs lazy structure generation seeded with the
/// Transfers optimum (valid by regime nesting).
IndexReport compute_stability_indices(const Market& market, const Regime& regime,
                                      const SolveSettings& settings = {});

/// Feasibility of the regime program at s ≡ 1. A false verdict carries a
/// blocking structure found on a best-effort candidate when one exists.
CheckResult check_rationalizable(const Market& market, const Regime& regime,
                                 const SolveSettings& settings = {});

/// The edge-level potential system of the transfers regime over a fixed
/// weight matrix: t free on committed vertices, zero elsewhere,
/// a_e + t_from − t_to ≥ 0 on cross edges, a ≥ 0 on the single options of
/// non-committed vertices. Feasible iff every permissible structure has
/// nonnegative weight sum.
lp::FeasibilityProgram build_transfer_potential_program(const EdgeMatrix& edges,
                                                        const CommittedSet& committed);

/// Reads the unobservables back out of a solved program.
AllocationCandidate candidate_from_solution(const Market& market,
                                            const lp::Solution& solution);

namespace detail {
/// Variable naming shared by the builder and the extractors.
std::string qm_var(int couple, int good);
std::string pm_var(const PairKey& key, int good);
std::string s_var(const PairKey& key);
std::string t_var(int couple);
}  // namespace detail

}  // namespace marstab
