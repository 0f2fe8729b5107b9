#include "market_io.hpp"

#include <fstream>
#include <set>

namespace marstab::io {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
  for (const auto& [key, val] : obj.items()) {
    (void)val;
    if (!required.count(key) && !optional.count(key))
      throw ParseError(where + ": unknown field \"" + key + "\"");
  }
  for (const std::string& key : required)
    if (!obj.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
}

int parse_side(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() == "∅") return PairKey::kEmpty;
    throw ParseError(where + ": expected an index or \"∅\"");
  }
  if (!v.is_number_integer() || v.get<int>() < 0)
    throw ParseError(where + ": expected a nonnegative index or \"∅\"");
  return v.get<int>();
}

Vec parse_vec(const json& v, int len, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != len)
    throw ParseError(where + ": expected an array of length " + std::to_string(len));
  Vec out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ParseError(where + ": non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

Market parse_market(const json& doc) {
  if (!doc.is_object()) throw ParseError("top level: expected an object");
  require_keys(doc, {"n_private", "n_public", "couples", "prices", "incomes"}, {},
               "top level");
  Market mk;
  mk.n_private = doc.at("n_private").get<int>();
  mk.n_public = doc.at("n_public").get<int>();

  const json& couples = doc.at("couples");
  if (!couples.is_array() || couples.empty())
    throw ParseError("couples: expected a nonempty array");
  const int C = static_cast<int>(couples.size());
  mk.matching.man_to_woman.assign(C, PairKey::kEmpty);
  mk.matching.woman_to_man.assign(C, PairKey::kEmpty);
  mk.committed.flags.assign(C, false);
  mk.q_obs.resize(C);
  mk.Q_obs.resize(C);
  bool any_assign = false;
  std::vector<Vec> am(C), aw(C);

  for (int i = 0; i < C; ++i) {
    const json& c = couples[i];
    std::string where = "couples[" + std::to_string(i) + "]";
    require_keys(c, {"man", "woman", "committed", "q", "Q"},
                 {"assignable_m", "assignable_w"}, where);
    int man = c.at("man").get<int>();
    int woman = c.at("woman").get<int>();
    if (man < 0 || man >= C || woman < 0 || woman >= C)
      throw ParseError(where + ": agent index out of range");
    if (mk.matching.man_to_woman[man] != PairKey::kEmpty)
      throw ParseError(where + ": duplicate man " + std::to_string(man));
    if (mk.matching.woman_to_man[woman] != PairKey::kEmpty)
      throw ParseError(where + ": duplicate woman " + std::to_string(woman));
    mk.matching.man_to_woman[man] = woman;
    mk.matching.woman_to_man[woman] = man;
    mk.committed.flags[man] = c.at("committed").get<bool>();
    mk.q_obs[man] = parse_vec(c.at("q"), mk.n_private, where + ".q");
    mk.Q_obs[man] = parse_vec(c.at("Q"), mk.n_public, where + ".Q");
    if (c.contains("assignable_m") || c.contains("assignable_w")) {
      if (!c.contains("assignable_m") || !c.contains("assignable_w"))
        throw ParseError(where + ": assignable data must cover both spouses");
      am[man] = parse_vec(c.at("assignable_m"), mk.n_private, where + ".assignable_m");
      aw[man] = parse_vec(c.at("assignable_w"), mk.n_private, where + ".assignable_w");
      any_assign = true;
    }
  }
  if (any_assign) {
    for (int c = 0; c < C; ++c) {
      if (am[c].empty()) am[c].assign(mk.n_private, 0.0);
      if (aw[c].empty()) aw[c].assign(mk.n_private, 0.0);
    }
    mk.assignable_m = std::move(am);
    mk.assignable_w = std::move(aw);
  }

  const json& prices = doc.at("prices");
  if (!prices.is_array()) throw ParseError("prices: expected an array");
  for (size_t i = 0; i < prices.size(); ++i) {
    const json& e = prices[i];
    std::string where = "prices[" + std::to_string(i) + "]";
    require_keys(e, {"m", "w", "p", "P"}, {}, where);
    PairKey k{parse_side(e.at("m"), where + ".m"), parse_side(e.at("w"), where + ".w")};
    if (k.man == PairKey::kEmpty && k.woman == PairKey::kEmpty)
      throw ParseError(where + ": both sides single");
    if (mk.p.count(k)) throw ParseError(where + ": duplicate pair " + to_string(k));
    mk.p[k] = parse_vec(e.at("p"), mk.n_private, where + ".p");
    mk.P[k] = parse_vec(e.at("P"), mk.n_public, where + ".P");
  }

  const json& incomes = doc.at("incomes");
  if (!incomes.is_array()) throw ParseError("incomes: expected an array");
  for (size_t i = 0; i < incomes.size(); ++i) {
    const json& e = incomes[i];
    std::string where = "incomes[" + std::to_string(i) + "]";
    require_keys(e, {"m", "w", "y"}, {}, where);
    PairKey k{parse_side(e.at("m"), where + ".m"), parse_side(e.at("w"), where + ".w")};
    if (mk.y.count(k)) throw ParseError(where + ": duplicate pair " + to_string(k));
    if (!e.at("y").is_number()) throw ParseError(where + ".y: expected a number");
    mk.y[k] = e.at("y").get<double>();
  }

  std::vector<Violation> bad = validate_market(mk);
  if (!bad.empty()) {
    std::string msg = "market fails validation:";
    for (const Violation& v : bad) msg += "\n  [" + v.code + "] " + v.message;
    throw ParseError(msg);
  }
  return mk;
}

Market load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_market(doc);
}

nlohmann::json pair_to_json(const PairKey& key) {
  json j;
  j["m"] = key.man == PairKey::kEmpty ? json("∅") : json(key.man);
  j["w"] = key.woman == PairKey::kEmpty ? json("∅") : json(key.woman);
  return j;
}

nlohmann::json market_to_json(const Market& mk) {
  json doc;
  doc["n_private"] = mk.n_private;
  doc["n_public"] = mk.n_public;
  json couples = json::array();
  for (int c = 0; c < mk.n_couples(); ++c) {
    json e;
    e["man"] = c;
    e["woman"] = mk.wife_of(c);
    e["committed"] = mk.committed.is_committed(c);
    e["q"] = mk.q_obs[c];
    e["Q"] = mk.Q_obs[c];
    if (mk.assignable_m) e["assignable_m"] = (*mk.assignable_m)[c];
    if (mk.assignable_w) e["assignable_w"] = (*mk.assignable_w)[c];
    couples.push_back(std::move(e));
  }
  doc["couples"] = std::move(couples);
  json prices = json::array();
  for (const auto& [k, p] : mk.p) {
    json e = pair_to_json(k);
    e["p"] = p;
    e["P"] = mk.P.at(k);
    prices.push_back(std::move(e));
  }
  doc["prices"] = std::move(prices);
  json incomes = json::array();
  for (const auto& [k, y] : mk.y) {
    json e = pair_to_json(k);
    e["y"] = y;
    incomes.push_back(std::move(e));
  }
  doc["incomes"] = std::move(incomes);
  return doc;
}

void save_market(const Market& mk, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << market_to_json(mk).dump(2) << "\n";
}

}  // namespace marstab::io
