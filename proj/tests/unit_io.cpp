#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "market_io.hpp"
#include "reports.hpp"

using namespace marstab;
using testutil::flat_market;

TEST_CASE("market survives a JSON round trip") {
  std::mt19937_64 rng(12);
  Market mk = testutil::random_market(rng, 3, 0.2, 0.5);
  Market back = io::parse_market(io::market_to_json(mk));
  CHECK(back.n_private == mk.n_private);
  CHECK(back.n_public == mk.n_public);
  CHECK(back.matching.man_to_woman == mk.matching.man_to_woman);
  CHECK(back.committed.flags == mk.committed.flags);
  CHECK(back.q_obs == mk.q_obs);
  CHECK(back.Q_obs == mk.Q_obs);
  CHECK(back.p == mk.p);
  CHECK(back.P == mk.P);
  CHECK(back.y == mk.y);
  CHECK(back.assignable_m.has_value() == mk.assignable_m.has_value());
}

TEST_CASE("assignable columns round trip when present") {
  Market mk = flat_market(2);
  mk.assignable_m = std::vector<Vec>{{0.1, 0.2}, {0.3, 0.1}};
  mk.assignable_w = std::vector<Vec>{{0.2, 0.2}, {0.2, 0.3}};
  Market back = io::parse_market(io::market_to_json(mk));
  REQUIRE(back.assignable_m.has_value());
  CHECK(*back.assignable_m == *mk.assignable_m);
  CHECK(*back.assignable_w == *mk.assignable_w);
}

TEST_CASE("unknown fields are rejected") {
  nlohmann::json doc = io::market_to_json(flat_market(1));
  doc["surprise"] = 1;
  CHECK_THROWS_AS(io::parse_market(doc), io::ParseError);

  nlohmann::json doc2 = io::market_to_json(flat_market(1));
  doc2["couples"][0]["favorite_color"] = "green";
  CHECK_THROWS_AS(io::parse_market(doc2), io::ParseError);
}

TEST_CASE("missing required fields are rejected") {
  nlohmann::json doc = io::market_to_json(flat_market(1));
  doc.erase("incomes");
  CHECK_THROWS_AS(io::parse_market(doc), io::ParseError);

  nlohmann::json doc2 = io::market_to_json(flat_market(1));
  doc2["prices"][0].erase("P");
  CHECK_THROWS_AS(io::parse_market(doc2), io::ParseError);
}

TEST_CASE("single options serialize with the empty marker") {
  nlohmann::json j = io::pair_to_json(man_single(1));
  CHECK(j["m"] == 1);
  CHECK(j["w"] == "∅");
  CHECK(io::pair_to_json(cross_pair(0, 2))["w"] == 2);

  // The marker parses back through a full document.
  Market back = io::parse_market(io::market_to_json(flat_market(2)));
  CHECK(back.y.count(man_single(0)) == 1);
  CHECK(back.y.count(woman_single(1)) == 1);
}

TEST_CASE("file save and load round trip") {
  Market mk = flat_market(2);
  std::string path = "io_roundtrip_test.json";
  io::save_market(mk, path);
  Market back = io::load_market(path);
  CHECK(back.y == mk.y);
  std::remove(path.c_str());
}

TEST_CASE("malformed text raises a parse error") {
  std::string path = "io_malformed_test.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(io::load_market(path), io::ParseError);
  CHECK_THROWS_AS(io::load_market("no_such_file_anywhere.json"), io::ParseError);
  std::remove(path.c_str());
}

TEST_CASE("report serializations carry the key numbers") {
  Market mk = flat_market(2);
  IndexReport rep = compute_stability_indices(mk, {RegimeKind::MutualConsentTransfers});
  nlohmann::json j = io::index_report_json(rep);
  CHECK(j["average"].get<double>() == doctest::Approx(rep.average));
  CHECK(j["s"].size() == rep.s.size());
  std::string csv = io::index_report_csv(rep);
  CHECK(csv.find("average") != std::string::npos);

  SharingBounds model = bound_sharing_rule(mk, {RegimeKind::MutualConsentTransfers});
  SharingBounds nb = naive_bounds(mk);
  nlohmann::json bj = io::bounds_json(model, nb);
  CHECK(bj["couples"].size() == 2);
  std::string bcsv = io::bounds_csv(model, nb);
  CHECK(bcsv.find("naive") != std::string::npos);
}

TEST_CASE("fixed-precision formatting") {
  CHECK(io::fmt6(1.0) == "1");
  CHECK(io::fmt6(0.123456789) == "0.123457");
  CHECK(io::fmt6(2.5) == "2.5");
}
