#include "marstab/market.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace marstab {

std::string to_string(const PairKey& k) {
  std::ostringstream os;
  os << "(";
  if (k.man == PairKey::kEmpty) os << "∅"; else os << "m" << k.man;
  os << ",";
  if (k.woman == PairKey::kEmpty) os << "∅"; else os << "w" << k.woman;
  os << ")";
  return os.str();
}

namespace {

bool finite_nonneg(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x) || x < 0.0) return false;
  return true;
}

bool finite_pos(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x) || x <= 0.0) return false;
  return true;
}

}  // namespace

std::vector<Violation> validate_market(const Market& mk) {
  std::vector<Violation> out;
  auto add = [&](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };

  const int M = mk.matching.n_men();
  const int W = mk.matching.n_women();
  if (M != W) add("UnequalSides", "market has " + std::to_string(M) + " men and " +
                                      std::to_string(W) + " women; v1 requires |M| = |W|");
  if (mk.n_private < 1) add("NoPrivateGoods", "n_private must be >= 1");
  if (mk.n_public < 0) add("BadPublicCount", "n_public must be >= 0");

  // Matching: full in v1 (married-couples focus), in range, mutually consistent.
  for (int m = 0; m < M; ++m) {
    int w = mk.matching.man_to_woman[m];
    if (w == PairKey::kEmpty) {
      add("UnmatchedMan", "man " + std::to_string(m) + " is single; v1 requires a full matching");
      continue;
    }
    if (w < 0 || w >= W) {
      add("MatchingOutOfRange", "man " + std::to_string(m) + " maps to woman " + std::to_string(w));
      continue;
    }
    if (mk.matching.woman_to_man[w] != m)
      add("MatchingInconsistent",
          "man " + std::to_string(m) + " maps to woman " + std::to_string(w) +
              " but she maps to man " + std::to_string(mk.matching.woman_to_man[w]));
  }
  for (int w = 0; w < W; ++w) {
    int m = mk.matching.woman_to_man[w];
    if (m == PairKey::kEmpty)
      add("UnmatchedWoman", "woman " + std::to_string(w) + " is single; v1 requires a full matching");
    else if (m < 0 || m >= M)
      add("MatchingOutOfRange", "woman " + std::to_string(w) + " maps to man " + std::to_string(m));
  }
  if (!out.empty()) return out;  // downstream checks assume a consistent matching

  const int C = mk.n_couples();
  if (mk.committed.size() != C)
    add("CommittedSizeMismatch", "committed flags cover " + std::to_string(mk.committed.size()) +
                                     " couples, expected " + std::to_string(C));

  // Observed bundles.
  if (static_cast<int>(mk.q_obs.size()) != C)
    add("MissingPrivateBundle", "q_obs has " + std::to_string(mk.q_obs.size()) + " entries");
  if (static_cast<int>(mk.Q_obs.size()) != C)
    add("MissingPublicBundle", "Q_obs has " + std::to_string(mk.Q_obs.size()) + " entries");
  for (int c = 0; c < C && c < static_cast<int>(mk.q_obs.size()); ++c) {
    if (static_cast<int>(mk.q_obs[c].size()) != mk.n_private || !finite_nonneg(mk.q_obs[c]))
      add("BadPrivateBundle", "couple " + std::to_string(c) + ": q_obs must be nonnegative length n");
  }
  for (int c = 0; c < C && c < static_cast<int>(mk.Q_obs.size()); ++c) {
    if (static_cast<int>(mk.Q_obs[c].size()) != mk.n_public || !finite_nonneg(mk.Q_obs[c]))
      add("BadPublicBundle", "couple " + std::to_string(c) + ": Q_obs must be nonnegative length N");
  }

  // Coverage: every potential pair plus every observed couple needs prices/income.
  std::vector<PairKey> keys;
  for (int m = 0; m < C; ++m)
    for (int w = 0; w < C; ++w) keys.push_back(cross_pair(m, w));
  for (int m = 0; m < C; ++m) keys.push_back(man_single(m));
  for (int w = 0; w < C; ++w) keys.push_back(woman_single(w));

  for (const PairKey& k : keys) {
    auto ip = mk.p.find(k);
    if (ip == mk.p.end())
      add("MissingPrivatePrice", "no private price for pair " + to_string(k));
    else if (static_cast<int>(ip->second.size()) != mk.n_private || !finite_pos(ip->second))
      add("BadPrivatePrice", "private price for " + to_string(k) + " must be strictly positive length n");
    auto iP = mk.P.find(k);
    if (iP == mk.P.end())
      add("MissingPublicPrice", "no public price for pair " + to_string(k));
    else if (static_cast<int>(iP->second.size()) != mk.n_public || !finite_pos(iP->second))
      add("BadPublicPrice", "public price for " + to_string(k) + " must be strictly positive length N");
    auto iy = mk.y.find(k);
    if (iy == mk.y.end())
      add("MissingIncome", "no income for pair " + to_string(k));
    else if (!std::isfinite(iy->second) || iy->second <= 0.0)
      add("BadIncome", "income for " + to_string(k) + " must be strictly positive");
  }

  // Assignable shares, when present.
  if (mk.assignable_m.has_value() != mk.assignable_w.has_value())
    add("AssignableOneSided", "assignable data must cover both spouses or neither");
  if (mk.assignable_m && mk.assignable_w) {
    if (static_cast<int>(mk.assignable_m->size()) != C ||
        static_cast<int>(mk.assignable_w->size()) != C) {
      add("AssignableSizeMismatch", "assignable data must have one entry per couple");
    } else {
      for (int c = 0; c < C; ++c) {
        const Vec& am = (*mk.assignable_m)[c];
        const Vec& aw = (*mk.assignable_w)[c];
        if (static_cast<int>(am.size()) != mk.n_private ||
            static_cast<int>(aw.size()) != mk.n_private ||
            !finite_nonneg(am) || !finite_nonneg(aw)) {
          add("BadAssignable", "couple " + std::to_string(c) + ": assignable vectors malformed");
          continue;
        }
        for (int k = 0; k < mk.n_private; ++k)
          if (am[k] + aw[k] > mk.q_obs[c][k] + 1e-9)
            add("AssignableExceedsTotal",
                "couple " + std::to_string(c) + " good " + std::to_string(k) +
                    ": assignable shares exceed the observed aggregate");
      }
    }
  }

  return out;
}

std::vector<Violation> validate_candidate(const Market& mk, const AllocationCandidate& cand) {
  std::vector<Violation> out;
  auto add = [&](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };
  const int C = mk.n_couples();
  const double tol = 1e-9;

  if (static_cast<int>(cand.q_m.size()) != C || static_cast<int>(cand.q_w.size()) != C) {
    add("ShareSizeMismatch", "candidate shares must have one entry per couple");
    return out;
  }
  for (int c = 0; c < C; ++c) {
    if (static_cast<int>(cand.q_m[c].size()) != mk.n_private ||
        static_cast<int>(cand.q_w[c].size()) != mk.n_private) {
      add("ShareLengthMismatch", "couple " + std::to_string(c));
      continue;
    }
    for (int k = 0; k < mk.n_private; ++k) {
      if (cand.q_m[c][k] < -tol || cand.q_w[c][k] < -tol)
        add("NegativeShare", "couple " + std::to_string(c) + " good " + std::to_string(k));
      if (std::abs(cand.q_m[c][k] + cand.q_w[c][k] - mk.q_obs[c][k]) > 1e-6)
        add("AddingUpViolated", "couple " + std::to_string(c) + " good " + std::to_string(k));
    }
  }
  for (int m = 0; m < C; ++m) {
    for (int w = 0; w < C; ++w) {
      if (w == mk.wife_of(m)) continue;
      PairKey k = cross_pair(m, w);
      auto im = cand.Pm.find(k);
      auto iw = cand.Pw.find(k);
      if (im == cand.Pm.end() || iw == cand.Pw.end()) {
        add("MissingLindahlSplit", "pair " + to_string(k));
        continue;
      }
      const Vec& Pk = mk.P.at(k);
      for (int j = 0; j < mk.n_public; ++j) {
        if (im->second[j] < -tol || iw->second[j] < -tol)
          add("NegativeLindahlPrice", "pair " + to_string(k));
        if (std::abs(im->second[j] + iw->second[j] - Pk[j]) > 1e-6)
          add("LindahlSplitViolated", "pair " + to_string(k));
      }
    }
  }
  if (cand.transfers) {
    if (static_cast<int>(cand.transfers->size()) != C)
      add("TransferSizeMismatch", "transfers must have one entry per couple");
    else
      for (int c = 0; c < C; ++c)
        if (!mk.committed.is_committed(c) && std::abs((*cand.transfers)[c]) > tol)
          add("TransferForNonCommitted", "couple " + std::to_string(c));
  }
  if (cand.s) {
    for (const auto& [k, v] : *cand.s)
      if (v < -tol || v > 1.0 + tol)
        add("IndexOutOfRange", "s for " + to_string(k) + " outside [0,1]");
  }
  return out;
}

std::vector<PairKey> potential_pairs(const Market& mk) {
  std::vector<PairKey> keys;
  const int C = mk.n_couples();
  keys.reserve(static_cast<size_t>(C) * (C + 1));
  for (int m = 0; m < C; ++m)
    for (int w = 0; w < C; ++w)
      if (w != mk.wife_of(m)) keys.push_back(cross_pair(m, w));
  for (int m = 0; m < C; ++m) keys.push_back(man_single(m));
  for (int w = 0; w < C; ++w) keys.push_back(woman_single(w));
  return keys;
}

AllocationCandidate equal_split_candidate(const Market& mk) {
  AllocationCandidate cand;
  const int C = mk.n_couples();
  cand.q_m.resize(C);
  cand.q_w.resize(C);
  for (int c = 0; c < C; ++c) {
    cand.q_m[c].resize(mk.n_private);
    cand.q_w[c].resize(mk.n_private);
    for (int k = 0; k < mk.n_private; ++k)
      cand.q_m[c][k] = cand.q_w[c][k] = 0.5 * mk.q_obs[c][k];
  }
  for (int m = 0; m < C; ++m) {
    for (int w = 0; w < C; ++w) {
      if (w == mk.wife_of(m)) continue;
      PairKey k = cross_pair(m, w);
      Vec half = mk.P.at(k);
      for (double& x : half) x *= 0.5;
      cand.Pm[k] = half;
      cand.Pw[k] = half;
    }
  }
  return cand;
}

}  // namespace marstab
