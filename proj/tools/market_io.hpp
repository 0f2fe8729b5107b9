#pragma once

#include <string>

#include <json.hpp>

#include "marstab/market.hpp"

namespace marstab::io {

/// Thrown on malformed files: unknown fields, missing keys, bad shapes.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict-schema market document:
/// {n_private, n_public,
///  couples: [{man, woman, committed, q, Q, assignable_m?, assignable_w?}],
///  prices:  [{m, w, p, P}],   // "∅" marks the single option
///  incomes: [{m, w, y}]}
Market parse_market(const nlohmann::json& doc);
Market load_market(const std::string& path);

nlohmann::json market_to_json(const Market& market);
void save_market(const Market& market, const std::string& path);

/// "∅"-aware pair key serialization used across all report formats.
nlohmann::json pair_to_json(const PairKey& key);

}  // namespace marstab::io
