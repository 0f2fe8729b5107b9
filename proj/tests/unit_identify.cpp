#include <doctest.h>

#include "helpers.hpp"
#include "marstab/identify.hpp"

using namespace marstab;
using testutil::flat_market;

namespace {

void add_assignable(Market& mk, double frac_m, double frac_w) {
  const int C = mk.n_couples();
  mk.assignable_m = std::vector<Vec>(C);
  mk.assignable_w = std::vector<Vec>(C);
  for (int c = 0; c < C; ++c) {
    Vec am(mk.n_private), aw(mk.n_private);
    for (int k = 0; k < mk.n_private; ++k) {
      am[k] = frac_m * mk.q_obs[c][k];
      aw[k] = frac_w * mk.q_obs[c][k];
    }
    (*mk.assignable_m)[c] = std::move(am);
    (*mk.assignable_w)[c] = std::move(aw);
  }
}

}  // namespace

TEST_CASE("naive bounds without assignable data span the whole budget") {
  Market mk = flat_market(2);
  SharingBounds nb = naive_bounds(mk);
  REQUIRE(nb.couples.size() == 2);
  for (const CoupleBounds& b : nb.couples) {
    CHECK(b.lower_frac == doctest::Approx(0.0));
    CHECK(b.upper_frac == doctest::Approx(1.0));
    CHECK(b.width_frac() == doctest::Approx(1.0));
    CHECK(b.total_private > 0.0);
    CHECK(b.lower_money == doctest::Approx(0.0));
    CHECK(b.upper_money == doctest::Approx(b.total_private));
  }
}

TEST_CASE("assignable shares pin the naive interval") {
  Market mk = flat_market(2);
  add_assignable(mk, 0.3, 0.4);
  REQUIRE(validate_market(mk).empty());
  SharingBounds nb = naive_bounds(mk);
  for (const CoupleBounds& b : nb.couples) {
    CHECK(b.lower_frac == doctest::Approx(0.40));
    CHECK(b.upper_frac == doctest::Approx(0.70));
    CHECK(b.width_frac() == doctest::Approx(0.30));
  }
}

TEST_CASE("fully assignable consumption collapses the naive width to zero") {
  Market mk = flat_market(2);
  add_assignable(mk, 0.55, 0.45);
  SharingBounds nb = naive_bounds(mk);
  for (const CoupleBounds& b : nb.couples) {
    CHECK(b.width_frac() == doctest::Approx(0.0));
    CHECK(b.lower_frac == doctest::Approx(0.45));
  }
}

TEST_CASE("flat committed transfers impose nothing beyond the naive bounds") {
  Market mk = flat_market(3);
  SharingBounds model =
      bound_sharing_rule(mk, {RegimeKind::MutualConsentTransfers});
  REQUIRE(model.status == lp::Status::Optimal);
  REQUIRE(model.couples.size() == 3);
  for (const CoupleBounds& b : model.couples) {
    CHECK(b.lower_frac == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(b.upper_frac == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("model bounds always sit inside the naive bounds") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 3; ++trial) {
    Market mk = testutil::random_market(rng, 3, 0.3, 0.5);
    add_assignable(mk, 0.2, 0.25);
    for (RegimeKind kind : {RegimeKind::Unilateral, RegimeKind::MutualConsentTransfers}) {
      CAPTURE(to_string(kind));
      SharingBounds model = bound_sharing_rule(mk, {kind});
      SharingBounds naive = naive_bounds(mk);
      REQUIRE(model.couples.size() == naive.couples.size());
      for (size_t c = 0; c < model.couples.size(); ++c) {
        CHECK(model.couples[c].lower_frac >= naive.couples[c].lower_frac - 1e-6);
        CHECK(model.couples[c].upper_frac <= naive.couples[c].upper_frac + 1e-6);
        CHECK(model.couples[c].lower_frac <= model.couples[c].upper_frac + 1e-6);
      }
    }
  }
}

TEST_CASE("per-option pinning also yields valid intervals") {
  std::mt19937_64 rng(77);
  Market mk = testutil::random_market(rng, 3, 0.2, 0.5);
  IdentifyOptions opts;
  opts.pinning = Pinning::PerOption;
  SharingBounds model = bound_sharing_rule(mk, {RegimeKind::MutualConsentTransfers}, opts);
  REQUIRE(model.status == lp::Status::Optimal);
  for (const CoupleBounds& b : model.couples) {
    CHECK(b.lower_frac >= -1e-6);
    CHECK(b.upper_frac <= 1.0 + 1e-6);
    CHECK(b.lower_frac <= b.upper_frac + 1e-6);
  }
}

TEST_CASE("width statistics summarize the couples") {
  SharingBounds sb;
  for (double w : {0.2, 0.6, 0.4}) {
    CoupleBounds b;
    b.lower_frac = 0.0;
    b.upper_frac = w;
    sb.couples.push_back(b);
  }
  WidthStats st = width_stats(sb);
  CHECK(st.mean == doctest::Approx(0.4));
  CHECK(st.min == doctest::Approx(0.2));
  CHECK(st.median == doctest::Approx(0.4));
  CHECK(st.max == doctest::Approx(0.6));

  WidthStats empty = width_stats(SharingBounds{});
  CHECK(empty.mean == doctest::Approx(0.0));
}

TEST_CASE("identification report covers every requested regime") {
  Market mk = flat_market(2);
  std::vector<Regime> regimes{{RegimeKind::Unilateral},
                              {RegimeKind::MutualConsentTransfers}};
  IdentificationReport rep = identification_report(mk, regimes);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].regime == "unilateral");
  CHECK(rep.rows[1].regime == "transfers");
  for (const auto& row : rep.rows) {
    CHECK(row.stats.min >= -1e-9);
    CHECK(row.stats.max <= 1.0 + 1e-9);
  }
}
