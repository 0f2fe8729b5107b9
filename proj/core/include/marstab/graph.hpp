#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "marstab/market.hpp"

namespace marstab {

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPermissible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedCoalition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Weighted directed graph over the observed couples: one weight per
/// potential-pair key (cross pairs plus single options). Negative weight
/// means the pair could afford a joint improvement at the fixed candidate.
struct EdgeMatrix {
  int n_couples = 0;
  std::vector<int> wife;  // couple index -> woman index (from the matching)
  std::map<PairKey, double> weights;
  double tolerance = 1e-7;  // ε for strict-sign tests

  double at(const PairKey& k) const { return weights.at(k); }
  /// Couple vertex a woman belongs to.
  int couple_of_woman(int w) const;
  /// The cross edge from couple `from` to couple `to`.
  PairKey cross_edge(int from, int to) const { return cross_pair(from, wife[to]); }
};

/// An ordered chain of rematches over couple vertices: edge j marries the man
/// of couples[j] to the wife of couples[j+1]. A cycle closes on couples[0].
/// Single-option structures hold one (m,∅)/(∅,w) edge and a single vertex.
struct PathOfRemarriages {
  std::vector<int> couples;     // visited couple vertices; cycle: first == last
  std::vector<PairKey> edges;
  bool is_cycle = false;

  bool is_single_option() const {
    return edges.size() == 1 && !edges.front().is_cross();
  }
  int first_couple() const { return couples.front(); }
  int last_couple() const { return couples.back(); }
  /// Men m_1..m_{n-1} driving the rematches.
  std::vector<int> men() const;
  friend bool operator==(const PathOfRemarriages&, const PathOfRemarriages&) = default;
};

/// Sum of edge weights along the structure.
double path_weight(const PathOfRemarriages& path, const EdgeMatrix& edges);

/// A set of agents plus a rematching among them. The rematch target may be
/// AgentId::empty() (the member goes single).
struct Coalition {
  std::vector<AgentId> members;
  std::map<AgentId, AgentId> rematch;

  bool rematches_to_single() const;
};

/// Checks the matching axioms on the coalition's rematching: every member has
/// a target, non-empty targets are members of the opposite side, involution.
bool coalition_is_valid(const Coalition& coalition);

/// Every committed member's current spouse is also a member.
bool coalition_is_permissible(const Coalition& coalition, const Matching& matching,
                              const CommittedSet& committed);

enum class BlockingMode { Consistency, Monotonicity };

/// Evaluates the edge-weight formula for every potential pair at a fixed
/// candidate. Stability indices default to 1 when the candidate has none.
EdgeMatrix build_edge_matrix(const Market& market, const AllocationCandidate& candidate,
                             double tolerance = 1e-7);

/// Weight of a single potential pair at the candidate.
double edge_weight(const Market& market, const AllocationCandidate& candidate,
                   const PairKey& key);

/// Searches for a permissible blocking structure.
///   Consistency:  all edges ≤ ε with at least one ≤ −ε.
///   Monotonicity: Σ weights ≤ −ε (negative-cycle detection over the couple
///                 graph augmented with a hub joining non-committed vertices).
/// Single-option edges are checked as standalone structures for
/// non-committed couples in both modes.
std::optional<PathOfRemarriages> find_blocking_structure(const EdgeMatrix& edges,
                                                         const CommittedSet& committed,
                                                         BlockingMode mode);

/// Extracts the path/cycle of remarriages contained in a permissible
/// coalition whose rematching pairs members with members (no single options).
/// Ties are broken by lowest index.
PathOfRemarriages coalition_to_path(const Coalition& coalition, const Matching& matching,
                                    const CommittedSet& committed);

/// True iff the structure is a cycle, or an open structure whose endpoint
/// couples are both non-committed.
bool path_is_permissible(const PathOfRemarriages& path, const CommittedSet& committed);

/// All permissible simple paths and cycles with at most max_len cross edges,
/// in deterministic order. Single-option structures are not included.
std::vector<PathOfRemarriages> enumerate_permissible_paths(const Market& market,
                                                           int max_len);

/// Same enumeration against an explicit committed set (the market's flags are
/// ignored); used when a regime overrides the committed set.
std::vector<PathOfRemarriages> enumerate_permissible_paths(int n_couples,
                                                           const std::vector<int>& wife,
                                                           const CommittedSet& committed,
                                                           int max_len);

}  // namespace marstab
