#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace marstab {

using Vec = std::vector<double>;

enum class Side { Man, Woman, Empty };

/// An agent in the market, or the stay-single option (Side::Empty).
struct AgentId {
  Side side = Side::Empty;
  int index = -1;  // unused for Empty

  static AgentId man(int i) { return {Side::Man, i}; }
  static AgentId woman(int i) { return {Side::Woman, i}; }
  static AgentId empty() { return {Side::Empty, -1}; }

  bool is_empty() const { return side == Side::Empty; }
  friend bool operator==(const AgentId& a, const AgentId& b) {
    if (a.side != b.side) return false;
    return a.side == Side::Empty || a.index == b.index;
  }
  friend bool operator<(const AgentId& a, const AgentId& b) {
    if (a.side != b.side) return a.side < b.side;
    if (a.side == Side::Empty) return false;
    return a.index < b.index;
  }
};

/// Key for a potential pair. Either side may be kEmpty (the single option),
/// but not both. Observed couples use the same key type.
struct PairKey {
  static constexpr int kEmpty = -1;
  int man = kEmpty;
  int woman = kEmpty;

  bool man_single() const { return woman == kEmpty; }    // (m, ∅)
  bool woman_single() const { return man == kEmpty; }    // (∅, w)
  bool is_cross() const { return man != kEmpty && woman != kEmpty; }

  friend bool operator==(const PairKey&, const PairKey&) = default;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

inline PairKey cross_pair(int m, int w) { return {m, w}; }
inline PairKey man_single(int m) { return {m, PairKey::kEmpty}; }
inline PairKey woman_single(int w) { return {PairKey::kEmpty, w}; }

std::string to_string(const PairKey& k);

/// Who is married to whom. Entry kEmpty means single (not used by v1 markets,
/// which require a full matching, but kept so partial data can be validated).
struct Matching {
  std::vector<int> man_to_woman;
  std::vector<int> woman_to_man;

  int n_men() const { return static_cast<int>(man_to_woman.size()); }
  int n_women() const { return static_cast<int>(woman_to_man.size()); }
  int wife_of(int m) const { return man_to_woman[m]; }
  int husband_of(int w) const { return woman_to_man[w]; }
};

/// One flag per observed couple; couples are indexed by the man's index.
struct CommittedSet {
  std::vector<bool> flags;

  bool is_committed(int couple) const { return flags[couple]; }
  int size() const { return static_cast<int>(flags.size()); }
  static CommittedSet all(int n) { return {std::vector<bool>(n, true)}; }
  static CommittedSet none(int n) { return {std::vector<bool>(n, false)}; }
};

/// The full observed dataset: matching, committed flags, aggregate bundles of
/// observed couples, and prices/incomes for every potential pair (singles
/// included, keyed as (m,∅) / (∅,w)).
struct Market {
  int n_private = 0;  // n
  int n_public = 0;   // N
  Matching matching;
  CommittedSet committed;

  // Indexed by couple (== man index). Lengths n_private / n_public.
  std::vector<Vec> q_obs;
  std::vector<Vec> Q_obs;

  std::map<PairKey, Vec> p;     // private prices, length n_private
  std::map<PairKey, Vec> P;     // public prices, length n_public
  std::map<PairKey, double> y;  // incomes

  // Observed lower bounds on individual private shares, per couple.
  std::optional<std::vector<Vec>> assignable_m;
  std::optional<std::vector<Vec>> assignable_w;

  int n_couples() const { return matching.n_men(); }
  int wife_of(int m) const { return matching.wife_of(m); }
  int husband_of(int w) const { return matching.husband_of(w); }
  /// Couple vertex that man m belongs to.
  int couple_of_man(int m) const { return m; }
  /// Couple vertex that woman w belongs to (her current husband's index).
  int couple_of_woman(int w) const { return matching.husband_of(w); }
};

/// Candidate values for the unobservables: private shares, Lindahl splits,
/// optional transfers and stability indices.
struct AllocationCandidate {
  std::vector<Vec> q_m;  // per couple, length n_private
  std::vector<Vec> q_w;  // per couple, length n_private

  std::map<PairKey, Vec> Pm;  // per cross pair, length n_public
  std::map<PairKey, Vec> Pw;

  std::optional<std::vector<double>> transfers;   // per couple
  std::optional<std::map<PairKey, double>> s;     // per outside option, [0,1]
};

struct Violation {
  std::string code;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every Market invariant; returns one entry per violation.
/// Empty result means the market is valid.
std::vector<Violation> validate_market(const Market& market);

/// Checks the AllocationCandidate invariants against a market
/// (adding-up, Lindahl splits, transfer zeroing, s range).
std::vector<Violation> validate_candidate(const Market& market,
                                          const AllocationCandidate& cand);

/// All outside-option keys: cross pairs excluding observed couples, then
/// (m,∅) for every man, then (∅,w) for every woman. Deterministic order.
std::vector<PairKey> potential_pairs(const Market& market);

/// Equal-split candidate: q_m = q_w = q_obs/2, Pm = Pw = P/2. Used as a
/// neutral starting point in tests and the oracle.
AllocationCandidate equal_split_candidate(const Market& market);

}  // namespace marstab
