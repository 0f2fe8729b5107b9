#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "marstab/graph.hpp"
#include "marstab/market.hpp"
#include "marstab/rationalize.hpp"

namespace marstab::oracle {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Piecewise-linear concave utility anchored at a reference bundle:
/// u(q,Q) = Σ_j v(x_j) over the deviations x from the reference, with
/// v(x) = min(slope_high · x, slope_low · x). Value 0 at the reference.
struct CandidateUtility {
  Vec q_ref;
  Vec Q_ref;
  double slope_low = 0.0;   // below every price component
  double slope_high = 0.0;  // above every price component

  double value(const Vec& q, const Vec& Q) const;
};

/// Slopes straddling the price extrema across every potential pair.
CandidateUtility make_candidate_utility(const Market& market, Vec q_ref, Vec Q_ref);

/// Every nonempty agent subset with every valid rematching (members may go
/// single) such that committed members bring their spouse, excluding
/// rematchings that re-pair anyone with their current spouse.
/// Throws TooLarge beyond 4 couples.
std::vector<Coalition> enumerate_permissible_coalitions(const Market& market);

/// Brute-force blocking test at a fixed candidate. The committed set follows
/// the regime (Unilateral behaves as if empty). Under the mutual consent
/// kinds, coalitions sending a committed member single are out of scope.
///   NoTransfers / Unilateral: all rematch edges ≤ ε with one ≤ −ε.
///   Transfers: every path/cycle component sum ≤ ε with one ≤ −ε.
std::optional<Coalition> blocking_coalition_exists(const Market& market,
                                                  const AllocationCandidate& candidate,
                                                  const Regime& regime,
                                                  double eps = 1e-7);

/// Lemma-style utility construction for one cross pair: true iff some
/// affordable bundle makes both candidate utilities strictly positive in sum
/// while each stays nonnegative (an LP over the hypograph of v).
bool candidate_utility_block_check(const Market& market,
                                   const AllocationCandidate& candidate,
                                   const PairKey& pair);

/// One-sided rationalizability search over a share grid (grid_steps points
/// per private-share dimension; Lindahl splits set to their edge-maximizing
/// corner, which is optimal for non-blocking). grid-true implies the regime
/// program is feasible; false proves nothing.
bool grid_search_rationalizability(const Market& market, int grid_steps,
                                   const Regime& regime, double eps = 1e-7);

/// The explicit transfer sequence certifying a violating structure:
/// t[0] = 0, t[j] = a_{edge j-1} + t[j-1], endpoints pinned to 0. With these
/// transfers every shifted edge is 0 except the last, which carries the sum.
std::vector<double> telescoped_transfers(const PathOfRemarriages& path,
                                         const EdgeMatrix& edges);

}  // namespace marstab::oracle
