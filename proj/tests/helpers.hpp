#pragma once

#include <random>

#include "marstab/market.hpp"
#include "marstab/graph.hpp"
#include "marstab/simulate.hpp"

namespace testutil {

using namespace marstab;

/// Flat prices (all 1), additive incomes, identity matching, budget-exact
/// bundles. The Corollary 1 setting when all couples are committed.
inline Market flat_market(const std::vector<double>& ym, const std::vector<double>& yw,
                          const std::vector<bool>& committed) {
  const int C = static_cast<int>(ym.size());
  Market mk;
  mk.n_private = 2;
  mk.n_public = 1;
  mk.matching.man_to_woman.resize(C);
  mk.matching.woman_to_man.resize(C);
  for (int c = 0; c < C; ++c) mk.matching.man_to_woman[c] = mk.matching.woman_to_man[c] = c;
  mk.committed.flags = committed;
  mk.q_obs.resize(C);
  mk.Q_obs.resize(C);
  for (int c = 0; c < C; ++c) {
    double y = ym[c] + yw[c];
    mk.q_obs[c] = {0.4 * y, 0.3 * y};
    mk.Q_obs[c] = {0.3 * y};
  }
  for (int m = 0; m < C; ++m)
    for (int w = 0; w < C; ++w) {
      PairKey k = cross_pair(m, w);
      mk.p[k] = {1.0, 1.0};
      mk.P[k] = {1.0};
      mk.y[k] = ym[m] + yw[w];
    }
  for (int m = 0; m < C; ++m) {
    mk.p[man_single(m)] = {1.0, 1.0};
    mk.P[man_single(m)] = {1.0};
    mk.y[man_single(m)] = ym[m];
  }
  for (int w = 0; w < C; ++w) {
    mk.p[woman_single(w)] = {1.0, 1.0};
    mk.P[woman_single(w)] = {1.0};
    mk.y[woman_single(w)] = yw[w];
  }
  return mk;
}

inline Market flat_market(int C, bool all_committed = true) {
  std::vector<double> ym(C), yw(C);
  for (int c = 0; c < C; ++c) {
    ym[c] = 1.0 + 0.1 * c;
    yw[c] = 1.2 + 0.05 * c;
  }
  return flat_market(ym, yw, std::vector<bool>(C, all_committed));
}

/// Random small market via the generator plus optional price/income noise.
inline Market random_market(std::mt19937_64& rng, int couples, double alpha = 0.0,
                            double committed_fraction = 1.0,
                            sim::ScenarioKind kind = sim::ScenarioKind::Both) {
  sim::GeneratorParams params;
  params.couples = couples;
  params.committed_fraction = committed_fraction;
  Market mk = sim::generate_market(params, rng);
  if (alpha > 0.0) mk = sim::apply_scenario(mk, kind, alpha, rng);
  return mk;
}

/// Random committed flags.
inline CommittedSet random_committed(std::mt19937_64& rng, int n, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  CommittedSet cs;
  cs.flags.resize(n);
  for (int i = 0; i < n; ++i) cs.flags[i] = coin(rng);
  return cs;
}

/// Random edge matrix over n couples with identity wife assignment.
inline EdgeMatrix random_edges(std::mt19937_64& rng, int n, double lo = -1.0,
                               double hi = 1.0) {
  std::uniform_real_distribution<double> weight(lo, hi);
  EdgeMatrix em;
  em.n_couples = n;
  em.wife.resize(n);
  for (int i = 0; i < n; ++i) em.wife[i] = i;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) em.weights[cross_pair(u, v)] = weight(rng);
  for (int c = 0; c < n; ++c) {
    em.weights[man_single(c)] = weight(rng);
    em.weights[woman_single(c)] = weight(rng);
  }
  return em;
}

/// Random candidate splits for an existing market (uniform shares, uniform
/// Lindahl splits).
inline AllocationCandidate random_candidate(std::mt19937_64& rng, const Market& mk) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AllocationCandidate cand;
  const int C = mk.n_couples();
  cand.q_m.assign(C, Vec(mk.n_private));
  cand.q_w.assign(C, Vec(mk.n_private));
  for (int c = 0; c < C; ++c)
    for (int k = 0; k < mk.n_private; ++k) {
      double share = unit(rng);
      cand.q_m[c][k] = share * mk.q_obs[c][k];
      cand.q_w[c][k] = mk.q_obs[c][k] - cand.q_m[c][k];
    }
  for (const PairKey& key : potential_pairs(mk)) {
    if (!key.is_cross()) continue;
    Vec pm(mk.n_public), pw(mk.n_public);
    for (int j = 0; j < mk.n_public; ++j) {
      double share = unit(rng);
      pm[j] = share * mk.P.at(key)[j];
      pw[j] = mk.P.at(key)[j] - pm[j];
    }
    cand.Pm[key] = std::move(pm);
    cand.Pw[key] = std::move(pw);
  }
  return cand;
}

}  // namespace testutil
