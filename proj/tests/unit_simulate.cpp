#include <doctest.h>

#include "helpers.hpp"
#include "marstab/simulate.hpp"

using namespace marstab;

TEST_CASE("generated couples exhaust their budget exactly") {
  std::mt19937_64 rng(1);
  sim::GeneratorParams params;
  params.couples = 6;
  Market mk = sim::generate_market(params, rng);
  REQUIRE(validate_market(mk).empty());
  for (int c = 0; c < mk.n_couples(); ++c) {
    PairKey key = cross_pair(c, c);
    double spend = mk.P.at(key)[0] * mk.Q_obs[c][0];
    for (int k = 0; k < mk.n_private; ++k) spend += mk.p.at(key)[k] * mk.q_obs[c][k];
    CHECK(spend == doctest::Approx(mk.y.at(key)));
  }
}

TEST_CASE("committed and assignable fractions are honored") {
  std::mt19937_64 rng(2);
  sim::GeneratorParams params;
  params.couples = 10;
  params.committed_fraction = 0.3;
  params.assignable_fraction = 0.5;
  Market mk = sim::generate_market(params, rng);

  int committed = 0;
  for (bool f : mk.committed.flags) committed += f;
  CHECK(committed == 3);
  CHECK(mk.committed.flags[0]);
  CHECK(!mk.committed.flags[9]);

  REQUIRE(mk.assignable_m.has_value());
  REQUIRE(mk.assignable_w.has_value());
  for (int c = 0; c < 10; ++c)
    for (int k = 0; k < 2; ++k) {
      double covered = (*mk.assignable_m)[c][k] + (*mk.assignable_w)[c][k];
      CHECK(covered == doctest::Approx(0.5 * mk.q_obs[c][k]));
    }
}

TEST_CASE("generation is deterministic in the seed") {
  sim::GeneratorParams params;
  params.couples = 5;
  std::mt19937_64 a(99), b(99), c(100);
  Market ma = sim::generate_market(params, a);
  Market mb = sim::generate_market(params, b);
  Market mc = sim::generate_market(params, c);
  CHECK(ma.y == mb.y);
  CHECK(ma.p == mb.p);
  CHECK(ma.q_obs == mb.q_obs);
  CHECK(ma.y != mc.y);
}

TEST_CASE("zero noise leaves the market unchanged") {
  std::mt19937_64 rng(3), noise(4);
  sim::GeneratorParams params;
  params.couples = 4;
  Market base = sim::generate_market(params, rng);
  Market out = sim::apply_scenario(base, sim::ScenarioKind::Both, 0.0, noise);
  CHECK(out.p == base.p);
  CHECK(out.P == base.P);
  CHECK(out.y == base.y);
}

TEST_CASE("price noise stays in band and spares observed pairs and wages") {
  std::mt19937_64 rng(5), noise(6);
  sim::GeneratorParams params;
  params.couples = 5;
  const double alpha = 0.25;
  Market base = sim::generate_market(params, rng);
  Market out = sim::apply_scenario(base, sim::ScenarioKind::Prices, alpha, noise);

  for (int c = 0; c < 5; ++c) {
    PairKey key = cross_pair(c, c);
    CHECK(out.p.at(key) == base.p.at(key));
    CHECK(out.y.at(key) == base.y.at(key));
  }
  for (const PairKey& key : potential_pairs(base)) {
    CHECK(out.p.at(key)[0] == base.p.at(key)[0]);  // leisure keeps the wage
    CHECK(out.p.at(key)[1] >= 1.0 - alpha - 1e-12);
    CHECK(out.p.at(key)[1] <= 1.0 + alpha + 1e-12);
    CHECK(out.P.at(key)[0] >= 1.0 - alpha - 1e-12);
    CHECK(out.P.at(key)[0] <= 1.0 + alpha + 1e-12);
    CHECK(out.y.at(key) == base.y.at(key));  // prices-only scenario
  }
}

TEST_CASE("income noise leaves every price untouched") {
  std::mt19937_64 rng(7), noise(8);
  sim::GeneratorParams params;
  params.couples = 5;
  const double alpha = 0.2;
  Market base = sim::generate_market(params, rng);
  Market out = sim::apply_scenario(base, sim::ScenarioKind::Income, alpha, noise);

  CHECK(out.p == base.p);
  CHECK(out.P == base.P);
  bool some_changed = false;
  for (const PairKey& key : potential_pairs(base)) {
    if (!key.is_cross()) {
      CHECK(out.y.at(key) == base.y.at(key));
      continue;
    }
    double ratio = out.y.at(key) / base.y.at(key);
    CHECK(ratio >= 1.0 - alpha - 1e-12);
    CHECK(ratio <= 1.0 + alpha + 1e-12);
    if (std::abs(ratio - 1.0) > 1e-9) some_changed = true;
  }
  CHECK(some_changed);
}

TEST_CASE("substream seeds differ across draws and match across calls") {
  CHECK(sim::substream_seed(1, 0) == sim::substream_seed(1, 0));
  CHECK(sim::substream_seed(1, 0) != sim::substream_seed(1, 1));
  CHECK(sim::substream_seed(1, 0) != sim::substream_seed(2, 0));
}

TEST_CASE("experiment report is deterministic and well shaped") {
  sim::ScenarioConfig cfg;
  cfg.kind = sim::ScenarioKind::Prices;
  cfg.alpha = 0.1;
  cfg.draws = 3;
  cfg.seed = 2024;
  cfg.params.couples = 3;
  std::vector<Regime> regimes{{RegimeKind::Unilateral},
                              {RegimeKind::MutualConsentTransfers}};

  sim::ExperimentReport a = sim::run_experiment({cfg}, regimes);
  sim::ExperimentReport b = sim::run_experiment({cfg}, regimes);
  REQUIRE(a.cells.size() == 2);
  CHECK(a.draws == 3);
  for (size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].scenario == "prices");
    CHECK(a.cells[i].alpha == doctest::Approx(0.1));
    CHECK(a.cells[i].failures == 0);
    CHECK(a.cells[i].index.mean == b.cells[i].index.mean);
    CHECK(a.cells[i].width.mean == b.cells[i].width.mean);
    CHECK(a.cells[i].index.min <= a.cells[i].index.mean + 1e-12);
    CHECK(a.cells[i].index.mean <= a.cells[i].index.max + 1e-12);
    CHECK(a.cells[i].index.max <= 1.0 + 1e-9);
  }
  CHECK(a.cells[0].regime == "unilateral");
  CHECK(a.cells[1].regime == "transfers");
}

TEST_CASE("a single draw collapses the spread statistics") {
  sim::ScenarioConfig cfg;
  cfg.kind = sim::ScenarioKind::Income;
  cfg.alpha = 0.15;
  cfg.draws = 1;
  cfg.seed = 7;
  cfg.params.couples = 2;
  sim::ExperimentReport rep =
      sim::run_experiment({cfg}, {{RegimeKind::MutualConsentTransfers}});
  REQUIRE(rep.cells.size() == 1);
  const sim::CellStats& st = rep.cells[0].index;
  CHECK(st.min == st.max);
  CHECK(st.mean == st.median);
  CHECK(st.mean == st.min);
}
