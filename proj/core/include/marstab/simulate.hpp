#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "marstab/identify.hpp"
#include "marstab/market.hpp"
#include "marstab/rationalize.hpp"

namespace marstab::sim {

enum class ScenarioKind { Prices, Income, Both };

std::string to_string(ScenarioKind kind);

/// Synthetic-market generator knobs. Defaults are deliberately uncalibrated;
/// the source microdata's marginals are not public.
struct GeneratorParams {
  int couples = 10;
  double income_low = 1.0;
  double income_high = 2.0;   // individual income range, both sexes
  double wage_low = 0.8;
  double wage_high = 1.2;     // hourly wage range (leisure price)
  double leisure_share = 0.4; // fraction of couple income spent on leisure
  double committed_fraction = 1.0;   // leading couples get the committed flag
  double assignable_fraction = 0.0;  // fraction of q_obs recorded as assignable
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Prices;
  double alpha = 0.0;  // perturbation magnitude, within [0,1]
  int draws = 1;
  uint64_t seed = 0;
  GeneratorParams params;
};

struct CellStats {
  double mean = 0.0, min = 0.0, median = 0.0, max = 0.0;
};

struct ExperimentReport {
  struct Cell {
    std::string scenario;
    double alpha = 0.0;
    std::string regime;
    CellStats index;   // over per-draw average stability indices
    CellStats width;   // over per-draw mean sharing-bound widths
    int failures = 0;  // draws whose solves did not finish
  };
  std::vector<Cell> cells;
  uint64_t seed = 0;
  int draws = 0;
};

/// Independent substream seed for draw `index` (splitmix64 mix of the seed).
uint64_t substream_seed(uint64_t seed, uint64_t index);

/// Two private goods (leisure at wages, a numeraire at price 1) and one
/// public good at price 1. Couple bundles exhaust income exactly: the
/// leisure share of income, then an equal private/public split of the rest.
Market generate_market(const GeneratorParams& params, std::mt19937_64& rng);

/// Price/income noise on the counterfactual pairs only. Prices touch the
/// numeraire components (1 + α·U[-1,1], redrawn while nonpositive); incomes
/// scale the baseline sum of individual incomes on cross pairs.
Market apply_scenario(const Market& baseline, ScenarioKind kind, double alpha,
                      std::mt19937_64& rng);

/// Full sweep: per config and regime, generate, perturb, compute index and
/// width statistics across draws. Deterministic given the seeds.
ExperimentReport run_experiment(const std::vector<ScenarioConfig>& configs,
                                const std::vector<Regime>& regimes,
                                const SolveSettings& settings = {});

}  // namespace marstab::sim
