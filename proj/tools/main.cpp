#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "market_io.hpp"
#include "marstab/oracle.hpp"
#include "marstab/simulate.hpp"
#include "reports.hpp"

namespace {

using namespace marstab;

Regime regime_from_name(const std::string& name) {
  Regime r;
  if (name == "unilateral") r.kind = RegimeKind::Unilateral;
  else if (name == "transfers") r.kind = RegimeKind::MutualConsentTransfers;
  else if (name == "no-transfers") r.kind = RegimeKind::MutualConsentNoTransfers;
  else throw CLI::ValidationError("--regime", "unknown regime: " + name);
  return r;
}

sim::ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "prices") return sim::ScenarioKind::Prices;
  if (name == "income") return sim::ScenarioKind::Income;
  if (name == "both") return sim::ScenarioKind::Both;
  throw CLI::ValidationError("--scenario", "unknown scenario: " + name);
}

struct CommonOpts {
  std::string path;
  std::string regime = "transfers";
  int max_path_len = 4;
  double eps = 1e-7;
  bool as_json = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("file", o.path, "market JSON file")->required();
  cmd->add_option("--regime", o.regime, "unilateral | transfers | no-transfers");
  cmd->add_option("--max-path-len", o.max_path_len, "structure length cap (no-transfers)");
  cmd->add_option("--eps", o.eps, "strictness tolerance");
  cmd->add_flag("--json", o.as_json, "machine-readable output");
}

SolveSettings settings_of(const CommonOpts& o) {
  SolveSettings st;
  st.build.max_path_len = o.max_path_len;
  st.build.eps = o.eps;
  return st;
}

int run_check(const CommonOpts& o) {
  Market mk = io::load_market(o.path);
  CheckResult res = check_rationalizable(mk, regime_from_name(o.regime), settings_of(o));
  if (res.status == lp::Status::NumericalFailure || res.status == lp::Status::Unbounded) {
    std::cerr << "solver failure: " << res.detail << "\n";
    return 2;
  }
  if (o.as_json) {
    nlohmann::json j;
    j["rationalizable"] = res.verdict;
    if (res.counterexample) j["counterexample"] = io::path_to_json(*res.counterexample);
    std::cout << j.dump(2) << "\n";
  } else if (res.verdict) {
    std::cout << "rationalizable\n";
  } else {
    std::cout << "not rationalizable\n";
    if (res.counterexample)
      std::cout << "blocking structure " << io::describe_path(*res.counterexample) << "\n";
  }
  return res.verdict ? 0 : 1;
}

int run_index(const CommonOpts& o) {
  Market mk = io::load_market(o.path);
  IndexReport rep = compute_stability_indices(mk, regime_from_name(o.regime), settings_of(o));
  if (rep.status != lp::Status::Optimal) {
    std::cerr << "solver failure: " << rep.detail << "\n";
    return 2;
  }
  std::cout << (o.as_json ? io::index_report_json(rep).dump(2) + "\n"
                          : io::index_report_csv(rep));
  return 0;
}

int run_identify(const CommonOpts& o, const std::string& pinning) {
  Market mk = io::load_market(o.path);
  IdentifyOptions opts;
  opts.settings = settings_of(o);
  opts.pinning = pinning == "per-option" ? Pinning::PerOption : Pinning::Aggregate;
  SharingBounds model = bound_sharing_rule(mk, regime_from_name(o.regime), opts);
  SharingBounds naive = naive_bounds(mk);
  if (model.status != lp::Status::Optimal) {
    std::cerr << "solver failure: " << model.detail << "\n";
    return 2;
  }
  std::cout << (o.as_json ? io::bounds_json(model, naive).dump(2) + "\n"
                          : io::bounds_csv(model, naive));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stable-marriage rationalizability toolkit"};
  app.require_subcommand(1);

  CommonOpts check_o, index_o, identify_o;
  std::string pinning = "aggregate";
  CLI::App* check = app.add_subcommand("check", "test rationalizability");
  add_common(check, check_o);
  CLI::App* index = app.add_subcommand("index", "compute stability indices");
  add_common(index, index_o);
  CLI::App* identify = app.add_subcommand("identify", "sharing-rule bounds");
  add_common(identify, identify_o);
  identify->add_option("--pinning", pinning, "aggregate | per-option");

  // simulate
  std::string scenario = "prices", out_prefix = "experiment";
  std::vector<double> alpha_grid{0.0};
  std::vector<std::string> regime_names{"unilateral", "transfers"};
  int draws = 10, couples = 10;
  uint64_t seed = 1;
  double committed_fraction = 1.0, assignable_fraction = 0.0;
  CLI::App* simulate = app.add_subcommand("simulate", "perturbation experiments");
  simulate->add_option("--scenario", scenario, "prices | income | both");
  simulate->add_option("--alpha-grid", alpha_grid, "perturbation magnitudes")->delimiter(',');
  simulate->add_option("--draws", draws, "markets per cell")->check(CLI::PositiveNumber);
  simulate->add_option("--couples", couples, "couples per market");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--regimes", regime_names, "regimes to sweep")->delimiter(',');
  simulate->add_option("--committed-fraction", committed_fraction, "share of committed couples");
  simulate->add_option("--assignable-fraction", assignable_fraction,
                       "share of consumption recorded as assignable");
  simulate->add_option("--out", out_prefix, "output file prefix (.json/.csv)");

  // gen
  std::string gen_out = "market.json";
  int gen_couples = 5;
  uint64_t gen_seed = 1;
  double gen_committed = 1.0, gen_assignable = 0.0;
  CLI::App* gen = app.add_subcommand("gen", "emit a synthetic market file");
  gen->add_option("--couples", gen_couples, "couples")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--committed-fraction", gen_committed, "share of committed couples");
  gen->add_option("--assignable-fraction", gen_assignable, "assignable share");
  gen->add_option("--out", gen_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    if (check->parsed()) return run_check(check_o);
    if (index->parsed()) return run_index(index_o);
    if (identify->parsed()) return run_identify(identify_o, pinning);
    if (simulate->parsed()) {
      std::vector<marstab::sim::ScenarioConfig> configs;
      for (double a : alpha_grid) {
        marstab::sim::ScenarioConfig cfg;
        cfg.kind = scenario_from_name(scenario);
        cfg.alpha = a;
        cfg.draws = draws;
        cfg.seed = seed;
        cfg.params.couples = couples;
        cfg.params.committed_fraction = committed_fraction;
        cfg.params.assignable_fraction = assignable_fraction;
        configs.push_back(cfg);
      }
      std::vector<marstab::Regime> regimes;
      for (const std::string& r : regime_names) regimes.push_back(regime_from_name(r));
      marstab::sim::ExperimentReport rep = marstab::sim::run_experiment(configs, regimes);
      std::ofstream js(out_prefix + ".json");
      js << marstab::io::experiment_json(rep).dump(2) << "\n";
      std::ofstream cs(out_prefix + ".csv");
      cs << marstab::io::experiment_csv(rep);
      std::cout << marstab::io::experiment_csv(rep);
      return 0;
    }
    if (gen->parsed()) {
      marstab::sim::GeneratorParams params;
      params.couples = gen_couples;
      params.committed_fraction = gen_committed;
      params.assignable_fraction = gen_assignable;
      std::mt19937_64 rng(marstab::sim::substream_seed(gen_seed, 0));
      marstab::io::save_market(marstab::sim::generate_market(params, rng), gen_out);
      return 0;
    }
  } catch (const marstab::io::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
