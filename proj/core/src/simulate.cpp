#include "marstab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace marstab::sim {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Prices: return "prices";
    case ScenarioKind::Income: return "income";
    case ScenarioKind::Both: return "both";
  }
  return "?";
}

uint64_t substream_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Market generate_market(const GeneratorParams& pr, std::mt19937_64& rng) {
  const int C = pr.couples;
  std::uniform_real_distribution<double> income(pr.income_low, pr.income_high);
  std::uniform_real_distribution<double> wage(pr.wage_low, pr.wage_high);

  std::vector<double> ym(C), yw(C), wm(C), ww(C);
  for (int c = 0; c < C; ++c) {
    ym[c] = income(rng);
    yw[c] = income(rng);
    wm[c] = wage(rng);
    ww[c] = wage(rng);
  }

  Market mk;
  mk.n_private = 2;  // leisure, numeraire
  mk.n_public = 1;
  mk.matching.man_to_woman.resize(C);
  mk.matching.woman_to_man.resize(C);
  std::iota(mk.matching.man_to_woman.begin(), mk.matching.man_to_woman.end(), 0);
  std::iota(mk.matching.woman_to_man.begin(), mk.matching.woman_to_man.end(), 0);
  int n_committed = static_cast<int>(std::lround(pr.committed_fraction * C));
  mk.committed.flags.assign(C, false);
  for (int c = 0; c < std::min(C, n_committed); ++c) mk.committed.flags[c] = true;

  mk.q_obs.resize(C);
  mk.Q_obs.resize(C);
  for (int c = 0; c < C; ++c) {
    double y = ym[c] + yw[c];
    double leisure_price = 0.5 * (wm[c] + ww[c]);
    double rest = (1.0 - pr.leisure_share) * y;
    mk.q_obs[c] = {pr.leisure_share * y / leisure_price, 0.5 * rest};
    mk.Q_obs[c] = {0.5 * rest};
  }

  for (int m = 0; m < C; ++m)
    for (int w = 0; w < C; ++w) {
      PairKey k = cross_pair(m, w);
      mk.p[k] = {0.5 * (wm[m] + ww[w]), 1.0};
      mk.P[k] = {1.0};
      mk.y[k] = ym[m] + yw[w];
    }
  for (int m = 0; m < C; ++m) {
    PairKey k = man_single(m);
    mk.p[k] = {wm[m], 1.0};
    mk.P[k] = {1.0};
    mk.y[k] = ym[m];
  }
  for (int w = 0; w < C; ++w) {
    PairKey k = woman_single(w);
    mk.p[k] = {ww[w], 1.0};
    mk.P[k] = {1.0};
    mk.y[k] = yw[w];
  }

  if (pr.assignable_fraction > 0.0) {
    std::uniform_real_distribution<double> share(0.2, 0.8);
    std::vector<Vec> am(C), aw(C);
    for (int c = 0; c < C; ++c) {
      double phi = share(rng);  // wife's underlying share
      am[c].resize(2);
      aw[c].resize(2);
      for (int k = 0; k < 2; ++k) {
        aw[c][k] = pr.assignable_fraction * phi * mk.q_obs[c][k];
        am[c][k] = pr.assignable_fraction * (1.0 - phi) * mk.q_obs[c][k];
      }
    }
    mk.assignable_m = std::move(am);
    mk.assignable_w = std::move(aw);
  }
  return mk;
}

Market apply_scenario(const Market& baseline, ScenarioKind kind, double alpha,
                      std::mt19937_64& rng) {
  Market mk = baseline;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto noisy = [&] {
    double f;
    do {
      f = 1.0 + alpha * unit(rng);
    } while (f <= 0.0);
    return f;
  };

  const bool prices = kind != ScenarioKind::Income;
  const bool income = kind != ScenarioKind::Prices;
  for (const PairKey& key : potential_pairs(baseline)) {
    if (prices) {
      mk.p.at(key)[1] = noisy();  // numeraire component; leisure keeps wages
      mk.P.at(key)[0] = noisy();
    }
    if (income && key.is_cross()) mk.y.at(key) = baseline.y.at(key) * noisy();
  }
  return mk;
}

namespace {

CellStats stats_of(std::vector<double> v) {
  CellStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return s;
}

}  // namespace

ExperimentReport run_experiment(const std::vector<ScenarioConfig>& configs,
                                const std::vector<Regime>& regimes,
                                const SolveSettings& settings) {
  ExperimentReport rep;
  if (!configs.empty()) {
    rep.seed = configs.front().seed;
    rep.draws = configs.front().draws;
  }
  for (const ScenarioConfig& cfg : configs) {
    // One market set per config, shared across regimes.
    std::vector<Market> markets;
    for (int d = 0; d < cfg.draws; ++d) {
      std::mt19937_64 rng(substream_seed(cfg.seed, d));
      Market base = generate_market(cfg.params, rng);
      markets.push_back(apply_scenario(base, cfg.kind, cfg.alpha, rng));
    }
    for (const Regime& regime : regimes) {
      ExperimentReport::Cell cell;
      cell.scenario = to_string(cfg.kind);
      cell.alpha = cfg.alpha;
      cell.regime = to_string(regime.kind);
      std::vector<double> indices, widths;
      for (const Market& mk : markets) {
        try {
          IndexReport ir = compute_stability_indices(mk, regime, settings);
          if (ir.status != lp::Status::Optimal) {
            ++cell.failures;
            continue;
          }
          indices.push_back(ir.average);
          IdentifyOptions io;
          io.settings = settings;
          SharingBounds sb = bound_sharing_rule(mk, regime, io);
          if (sb.status != lp::Status::Optimal) {
            ++cell.failures;
            continue;
          }
          widths.push_back(width_stats(sb).mean);
        } catch (const std::exception&) {
          ++cell.failures;
        }
      }
      cell.index = stats_of(std::move(indices));
      cell.width = stats_of(std::move(widths));
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

}  // namespace marstab::sim
