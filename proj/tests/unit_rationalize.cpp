#include <doctest.h>

#include "helpers.hpp"
#include "marstab/rationalize.hpp"

using namespace marstab;
using testutil::flat_market;

namespace {

int count_binaries(const lp::FeasibilityProgram& p) {
  int n = 0;
  for (int v = 0; v < p.n_variables(); ++v)
    if (p.kind(v) == lp::VarKind::Binary) ++n;
  return n;
}

Market scaled(Market mk, double lambda) {
  for (auto& [key, vec] : mk.p)
    for (double& x : vec) x *= lambda;
  for (auto& [key, vec] : mk.P)
    for (double& x : vec) x *= lambda;
  for (auto& [key, y] : mk.y) y *= lambda;
  return mk;
}

}  // namespace

TEST_CASE("single-couple unilateral program has one stability row per single option") {
  Market mk = flat_market(1);
  lp::FeasibilityProgram p = build_program(mk, {RegimeKind::Unilateral});
  CHECK(p.n_constraints() == 2);
  CHECK(p.index_of(detail::qm_var(0, 0)) >= 0);
  CHECK(p.index_of(detail::qm_var(0, 1)) >= 0);
  CHECK(!p.has_binaries());
}

TEST_CASE("transfers program carries one transfer per committed couple") {
  Market mk = flat_market(2);
  lp::FeasibilityProgram p = build_program(mk, {RegimeKind::MutualConsentTransfers});
  CHECK(p.index_of(detail::t_var(0)) >= 0);
  CHECK(p.index_of(detail::t_var(1)) >= 0);

  mk.committed.flags = {false, false};
  lp::FeasibilityProgram q = build_program(mk, {RegimeKind::MutualConsentTransfers});
  CHECK(q.index_of(detail::t_var(0)) < 0);
  CHECK(q.index_of(detail::t_var(1)) < 0);
}

TEST_CASE("no-transfers program over two committed couples has one path and three binaries") {
  Market mk = flat_market(2);
  BuildOptions opts;
  opts.max_path_len = 2;
  lp::FeasibilityProgram p =
      build_program(mk, {RegimeKind::MutualConsentNoTransfers}, opts);
  // The only permissible structure is the two-cycle: one structure selector
  // plus one strict-edge selector per edge.
  CHECK(count_binaries(p) == 3);
}

TEST_CASE("unbounded path length on a large market requires an explicit limit") {
  Market mk = flat_market(7);
  BuildOptions opts;
  opts.max_path_len = 0;
  CHECK_THROWS_AS(build_program(mk, {RegimeKind::MutualConsentNoTransfers}, opts),
                  PathLimitRequired);
}

TEST_CASE("flat committed markets are exactly rationalizable under mutual consent") {
  Market mk = flat_market(3);
  for (RegimeKind kind :
       {RegimeKind::MutualConsentTransfers, RegimeKind::MutualConsentNoTransfers}) {
    CAPTURE(to_string(kind));
    IndexReport rep = compute_stability_indices(mk, {kind});
    REQUIRE(rep.status == lp::Status::Optimal);
    CHECK(rep.average == doctest::Approx(1.0));
    CHECK(rep.s.size() == potential_pairs(mk).size());
    for (const auto& [key, s] : rep.s) CHECK(s == doctest::Approx(1.0));

    CheckResult chk = check_rationalizable(mk, {kind});
    CHECK(chk.verdict);
    REQUIRE(chk.witness.has_value());
    CHECK(validate_candidate(mk, *chk.witness).empty());
    CHECK(!chk.counterexample.has_value());
  }
}

TEST_CASE("single couple with affordable single options is rationalizable unilaterally") {
  Market mk = flat_market(1);
  IndexReport rep = compute_stability_indices(mk, {RegimeKind::Unilateral});
  REQUIRE(rep.status == lp::Status::Optimal);
  CHECK(rep.average == doctest::Approx(1.0));
  CHECK(check_rationalizable(mk, {RegimeKind::Unilateral}).verdict);
}

TEST_CASE("indices stay within the unit interval") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Market mk = testutil::random_market(rng, 3, 0.3, 0.5);
    IndexReport rep = compute_stability_indices(mk, {RegimeKind::Unilateral});
    REQUIRE(rep.status == lp::Status::Optimal);
    CHECK(rep.average <= 1.0 + 1e-9);
    for (const auto& [key, s] : rep.s) {
      CHECK(s >= -1e-9);
      CHECK(s <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("rich single options break unilateral stability but not full commitment") {
  Market mk = flat_market(2, /*all_committed=*/false);
  for (int c = 0; c < 2; ++c) {
    mk.y[man_single(c)] = 10.0;
    mk.y[woman_single(c)] = 10.0;
  }
  REQUIRE(validate_market(mk).empty());

  CheckResult uni = check_rationalizable(mk, {RegimeKind::Unilateral});
  CHECK(!uni.verdict);
  REQUIRE(uni.counterexample.has_value());
  CHECK(path_is_permissible(*uni.counterexample, CommittedSet{{false, false}}));

  IndexReport rep = compute_stability_indices(mk, {RegimeKind::Unilateral});
  REQUIRE(rep.status == lp::Status::Optimal);
  CHECK(rep.average < 1.0 - 1e-6);

  // Committed couples keep their single options off the table.
  mk.committed.flags = {true, true};
  CHECK(check_rationalizable(mk, {RegimeKind::MutualConsentTransfers}).verdict);
  CHECK(check_rationalizable(mk, {RegimeKind::MutualConsentNoTransfers}).verdict);
}

TEST_CASE("an all-false committed set makes mutual consent agree with unilateral") {
  std::mt19937_64 rng(21);
  Market mk = testutil::random_market(rng, 3, 0.4, 0.0);
  mk.committed.flags.assign(3, false);

  IndexReport uni = compute_stability_indices(mk, {RegimeKind::Unilateral});
  IndexReport mct =
      compute_stability_indices(mk, {RegimeKind::MutualConsentTransfers});
  REQUIRE(uni.status == lp::Status::Optimal);
  REQUIRE(mct.status == lp::Status::Optimal);
  CHECK(uni.average == doctest::Approx(mct.average).epsilon(1e-6));
}

TEST_CASE("regime nesting orders the aggregate indices") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 4; ++trial) {
    Market mk = testutil::random_market(rng, 3, 0.5, 0.6);
    double uni =
        compute_stability_indices(mk, {RegimeKind::Unilateral}).average;
    double mct =
        compute_stability_indices(mk, {RegimeKind::MutualConsentTransfers}).average;
    double mcn =
        compute_stability_indices(mk, {RegimeKind::MutualConsentNoTransfers}).average;
    CHECK(uni <= mct + 1e-6);
    CHECK(mct <= mcn + 1e-6);
  }
}

TEST_CASE("indices are invariant to a common rescaling of prices and incomes") {
  std::mt19937_64 rng(55);
  Market mk = testutil::random_market(rng, 3, 0.4, 0.5);
  Market big = scaled(mk, 3.0);
  double a = compute_stability_indices(mk, {RegimeKind::Unilateral}).average;
  double b = compute_stability_indices(big, {RegimeKind::Unilateral}).average;
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("transfer potential system matches the structure-sum condition") {
  CommittedSet both{{true, true}};
  EdgeMatrix em;
  em.n_couples = 2;
  em.wife = {0, 1};
  em.weights[cross_pair(0, 1)] = -1.0;
  em.weights[cross_pair(1, 0)] = 0.5;
  em.weights[man_single(0)] = -5.0;  // ignored: committed vertices
  em.weights[man_single(1)] = -5.0;
  em.weights[woman_single(0)] = -5.0;
  em.weights[woman_single(1)] = -5.0;

  // Swap cycle sums to -0.5: no potential exists.
  CHECK(lp::solve(build_transfer_potential_program(em, both)).status ==
        lp::Status::Infeasible);

  // Raising the return edge makes the cycle sum +0.5: feasible.
  em.weights[cross_pair(1, 0)] = 1.5;
  CHECK(lp::solve(build_transfer_potential_program(em, both)).status ==
        lp::Status::Optimal);

  // A non-committed couple's negative single option is an outright violation.
  CommittedSet none{{false, false}};
  CHECK(lp::solve(build_transfer_potential_program(em, none)).status ==
        lp::Status::Infeasible);
}

TEST_CASE("regime helpers") {
  CHECK(to_string(RegimeKind::Unilateral) == "unilateral");
  CHECK(to_string(RegimeKind::MutualConsentTransfers) == "transfers");
  CHECK(to_string(RegimeKind::MutualConsentNoTransfers) == "no-transfers");

  Market mk = flat_market(2);
  Regime uni{RegimeKind::Unilateral};
  CommittedSet eff = uni.effective_committed(mk);
  for (bool f : eff.flags) CHECK(!f);

  Regime over{RegimeKind::MutualConsentTransfers, CommittedSet{{false, true}}};
  CHECK(over.effective_committed(mk).flags == std::vector<bool>{false, true});
}
