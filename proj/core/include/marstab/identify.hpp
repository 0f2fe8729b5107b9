#pragma once

#include <string>
#include <vector>

#include "marstab/rationalize.hpp"

namespace marstab {

/// Bounds on the wife's private expenditure at observed prices, per couple.
/// Husband bounds follow by complementation against the couple total.
struct CoupleBounds {
  double lower_money = 0.0;
  double upper_money = 0.0;
  double total_private = 0.0;  // p_obs · q_obs for the couple
  double lower_frac = 0.0;
  double upper_frac = 1.0;

  double width_frac() const { return upper_frac - lower_frac; }
};

struct SharingBounds {
  std::vector<CoupleBounds> couples;
  lp::Status status = lp::Status::Optimal;
  std::string detail;
};

/// How the optimal stability indices are held fixed while bounding shares.
enum class Pinning { Aggregate, PerOption };

struct IdentifyOptions {
  Pinning pinning = Pinning::Aggregate;
  SolveSettings settings;
};

/// Min/max of the wife's private expenditure subject to the regime program
/// with indices pinned at their optimum (aggregate Σs ≥ Σs* by default).
SharingBounds bound_sharing_rule(const Market& market, const Regime& regime,
                                 const IdentifyOptions& opts = {});

/// Bounds implied by assignable consumption alone, no model constraints.
SharingBounds naive_bounds(const Market& market);

struct WidthStats {
  double mean = 0.0, min = 0.0, median = 0.0, max = 0.0;
};

WidthStats width_stats(const SharingBounds& bounds);

struct IdentificationReport {
  struct Row {
    std::string regime;
    WidthStats stats;
  };
  std::vector<Row> rows;
};

/// Width statistics per regime, Table-style aggregation.
IdentificationReport identification_report(const Market& market,
                                           const std::vector<Regime>& regimes,
                                           const IdentifyOptions& opts = {});

}  // namespace marstab
