#include "marstab/identify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace marstab {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void fill_fractions(CoupleBounds& b) {
  if (b.total_private > 0.0) {
    b.lower_frac = b.lower_money / b.total_private;
    b.upper_frac = b.upper_money / b.total_private;
  } else {
    b.lower_frac = 0.0;
    b.upper_frac = 0.0;
  }
  b.lower_frac = std::clamp(b.lower_frac, 0.0, 1.0);
  b.upper_frac = std::clamp(b.upper_frac, b.lower_frac, 1.0);
}

}  // namespace

SharingBounds naive_bounds(const Market& mk) {
  SharingBounds out;
  const int C = mk.n_couples();
  out.couples.resize(C);
  for (int c = 0; c < C; ++c) {
    const Vec& p = mk.p.at(cross_pair(c, mk.wife_of(c)));
    CoupleBounds& b = out.couples[c];
    b.total_private = dot(p, mk.q_obs[c]);
    b.lower_money = mk.assignable_w ? dot(p, (*mk.assignable_w)[c]) : 0.0;
    b.upper_money =
        b.total_private - (mk.assignable_m ? dot(p, (*mk.assignable_m)[c]) : 0.0);
    fill_fractions(b);
  }
  return out;
}

SharingBounds bound_sharing_rule(const Market& mk, const Regime& regime,
                                 const IdentifyOptions& opts) {
  const int C = mk.n_couples();
  SharingBounds out;
  out.couples = naive_bounds(mk).couples;  // fallback values when a solve fails

  SolveSettings st = opts.settings;
  st.build.with_indices = true;
  IndexReport rep = compute_stability_indices(mk, regime, st);
  if (rep.status != lp::Status::Optimal) {
    out.status = rep.status;
    out.detail = "index stage: " + rep.detail;
    return out;
  }

  const double slack = st.lp.feas_tol;
  auto pinned_program = [&] {
    lp::FeasibilityProgram prog = build_program(mk, regime, st.build);
    if (opts.pinning == Pinning::Aggregate) {
      lp::Row row;
      double total = 0.0;
      for (const auto& [key, val] : rep.s) {
        row.emplace_back(prog.index_of(detail::s_var(key)), 1.0);
        total += val;
      }
      prog.add_constraint(std::move(row), lp::Relation::GreaterEq, total - slack);
    } else {
      for (const auto& [key, val] : rep.s)
        prog.add_constraint({{prog.index_of(detail::s_var(key)), 1.0}},
                            lp::Relation::GreaterEq, val - slack);
    }
    return prog;
  };

  for (int c = 0; c < C; ++c) {
    const Vec& p = mk.p.at(cross_pair(c, mk.wife_of(c)));
    // η^w = p·q_w = p·q_obs − p·q_m, so extremes of p·q_m give the bounds.
    auto solve_husband_spend = [&](lp::Sense sense) -> std::optional<double> {
      lp::FeasibilityProgram prog = pinned_program();
      lp::Row obj;
      for (int k = 0; k < mk.n_private; ++k)
        obj.emplace_back(prog.index_of(detail::qm_var(c, k)), p[k]);
      prog.set_objective(std::move(obj), sense);
      lp::Solution sol = lp::solve(prog, st.lp);
      if (sol.status != lp::Status::Optimal) {
        out.status = sol.status;
        out.detail = sol.detail;
        return std::nullopt;
      }
      return *sol.objective_value;
    };
    auto hi_m = solve_husband_spend(lp::Sense::Maximize);
    auto lo_m = solve_husband_spend(lp::Sense::Minimize);
    if (!hi_m || !lo_m) continue;  // keep the naive fallback for this couple
    CoupleBounds& b = out.couples[c];
    b.lower_money = std::max(0.0, b.total_private - *hi_m);
    b.upper_money = std::min(b.total_private, b.total_private - *lo_m);
    fill_fractions(b);
  }
  return out;
}

WidthStats width_stats(const SharingBounds& bounds) {
  WidthStats st;
  if (bounds.couples.empty()) return st;
  std::vector<double> w;
  w.reserve(bounds.couples.size());
  for (const CoupleBounds& b : bounds.couples) w.push_back(b.width_frac());
  std::sort(w.begin(), w.end());
  st.min = w.front();
  st.max = w.back();
  st.mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  size_t n = w.size();
  st.median = n % 2 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
  return st;
}

IdentificationReport identification_report(const Market& mk,
                                           const std::vector<Regime>& regimes,
                                           const IdentifyOptions& opts) {
  IdentificationReport rep;
  for (const Regime& r : regimes)
    rep.rows.push_back({to_string(r.kind), width_stats(bound_sharing_rule(mk, r, opts))});
  return rep;
}

}  // namespace marstab
