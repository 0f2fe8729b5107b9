#include "marstab/rationalize.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace marstab {

std::string to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Unilateral: return "unilateral";
    case RegimeKind::MutualConsentNoTransfers: return "no-transfers";
    case RegimeKind::MutualConsentTransfers: return "transfers";
  }
  return "?";
}

CommittedSet Regime::effective_committed(const Market& mk) const {
  if (kind == RegimeKind::Unilateral) return CommittedSet::none(mk.n_couples());
  if (committed_override) return *committed_override;
  return mk.committed;
}

namespace detail {
std::string qm_var(int couple, int good) {
  return "qm_c" + std::to_string(couple) + "_g" + std::to_string(good);
}
std::string pm_var(const PairKey& key, int good) {
  return "Pm_m" + std::to_string(key.man) + "_w" + std::to_string(key.woman) + "_g" +
         std::to_string(good);
}
std::string s_var(const PairKey& key) {
  std::string m = key.man == PairKey::kEmpty ? "e" : "m" + std::to_string(key.man);
  std::string w = key.woman == PairKey::kEmpty ? "e" : "w" + std::to_string(key.woman);
  return "s_" + m + "_" + w;
}
std::string t_var(int couple) { return "t_c" + std::to_string(couple); }
}  // namespace detail

namespace {

using lp::Row;

struct Affine {
  Row row;
  double constant = 0.0;
};

/// Shared builder state: variable indices for the unobservables.
struct ProgramVars {
  lp::FeasibilityProgram prog;
  std::vector<std::vector<int>> qm;   // [couple][good]
  std::map<PairKey, std::vector<int>> pm;
  std::map<PairKey, int> s;           // empty when indices are fixed at 1
  std::map<int, int> t;               // committed couple -> transfer variable
  bool with_indices = false;
};

ProgramVars make_vars(const Market& mk, bool with_indices) {
  ProgramVars v;
  v.with_indices = with_indices;
  const int C = mk.n_couples();
  v.qm.assign(C, std::vector<int>(mk.n_private, -1));
  for (int c = 0; c < C; ++c)
    for (int k = 0; k < mk.n_private; ++k) {
      double lo = mk.assignable_m ? (*mk.assignable_m)[c][k] : 0.0;
      double hi = mk.q_obs[c][k] - (mk.assignable_w ? (*mk.assignable_w)[c][k] : 0.0);
      v.qm[c][k] = v.prog.add_variable(detail::qm_var(c, k), lo, std::max(lo, hi));
    }
  for (const PairKey& key : potential_pairs(mk)) {
    if (key.is_cross()) {
      std::vector<int>& ids = v.pm[key];
      for (int j = 0; j < mk.n_public; ++j)
        ids.push_back(v.prog.add_variable(detail::pm_var(key, j), 0.0, mk.P.at(key)[j]));
    }
    if (with_indices) v.s[key] = v.prog.add_variable(detail::s_var(key), 0.0, 1.0);
  }
  return v;
}

/// Edge weight a_key as an affine expression in the program variables, with
/// q_w and Pw already eliminated. Fixed-index programs fold y into the
/// constant.
Affine edge_expr(const Market& mk, const ProgramVars& v, const PairKey& key) {
  Affine e;
  const double y = mk.y.at(key);
  if (v.with_indices)
    e.row.emplace_back(v.s.at(key), -y);
  else
    e.constant -= y;

  const Vec& p = mk.p.at(key);
  if (key.is_cross()) {
    const int cm = key.man;
    const int cw = mk.couple_of_woman(key.woman);
    for (int k = 0; k < mk.n_private; ++k) {
      e.row.emplace_back(v.qm[cm][k], p[k]);
      e.row.emplace_back(v.qm[cw][k], -p[k]);
      e.constant += p[k] * mk.q_obs[cw][k];
    }
    const Vec& P = mk.P.at(key);
    const std::vector<int>& pm = v.pm.at(key);
    for (int j = 0; j < mk.n_public; ++j) {
      e.row.emplace_back(pm[j], mk.Q_obs[cm][j] - mk.Q_obs[cw][j]);
      e.constant += P[j] * mk.Q_obs[cw][j];
    }
  } else if (key.man_single()) {
    const int c = key.man;
    for (int k = 0; k < mk.n_private; ++k) e.row.emplace_back(v.qm[c][k], p[k]);
    for (int j = 0; j < mk.n_public; ++j) e.constant += mk.P.at(key)[j] * mk.Q_obs[c][j];
  } else {
    const int c = mk.couple_of_woman(key.woman);
    for (int k = 0; k < mk.n_private; ++k) {
      e.row.emplace_back(v.qm[c][k], -p[k]);
      e.constant += p[k] * mk.q_obs[c][k];
    }
    for (int j = 0; j < mk.n_public; ++j) e.constant += mk.P.at(key)[j] * mk.Q_obs[c][j];
  }
  return e;
}

/// Interval bound on |expr| over the variable boxes.
double magnitude_bound(const lp::FeasibilityProgram& prog, const Affine& e) {
  double lo = e.constant, hi = e.constant;
  for (const auto& [var, c] : e.row) {
    double a = c * prog.lower(var), b = c * prog.upper(var);
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  return std::max(std::abs(lo), std::abs(hi));
}

void add_geq0(ProgramVars& v, const Affine& e, double slack = 0.0) {
  v.prog.add_constraint(e.row, lp::Relation::GreaterEq, slack - e.constant);
}

int effective_path_len(const Market& mk, const BuildOptions& opts) {
  if (opts.max_path_len > 0) return opts.max_path_len;
  if (mk.n_couples() > 6)
    throw PathLimitRequired("unbounded max_path_len on a market with " +
                            std::to_string(mk.n_couples()) + " couples");
  return mk.n_couples();
}

lp::FeasibilityProgram build_impl(const Market& mk, const Regime& regime,
                                  const BuildOptions& opts,
                                  const std::vector<PathOfRemarriages>* paths) {
  const CommittedSet committed = regime.effective_committed(mk);
  ProgramVars v = make_vars(mk, opts.with_indices);

  std::map<PairKey, Affine> exprs;
  for (const PairKey& key : potential_pairs(mk)) exprs[key] = edge_expr(mk, v, key);

  switch (regime.kind) {
    case RegimeKind::Unilateral:
      for (const auto& [key, e] : exprs) add_geq0(v, e);
      break;

    case RegimeKind::MutualConsentTransfers: {
      for (int c = 0; c < mk.n_couples(); ++c)
        if (committed.is_committed(c))
          v.t[c] = v.prog.add_variable(detail::t_var(c), -lp::kInf, lp::kInf);
      for (const auto& [key, e] : exprs) {
        if (key.is_cross()) {
          Affine row = e;
          int cm = key.man, cw = mk.couple_of_woman(key.woman);
          if (auto it = v.t.find(cm); it != v.t.end()) row.row.emplace_back(it->second, 1.0);
          if (auto it = v.t.find(cw); it != v.t.end()) row.row.emplace_back(it->second, -1.0);
          add_geq0(v, row);
        } else {
          int c = key.man_single() ? key.man : mk.couple_of_woman(key.woman);
          if (!committed.is_committed(c)) add_geq0(v, e);
        }
      }
      break;
    }

    case RegimeKind::MutualConsentNoTransfers: {
      for (const auto& [key, e] : exprs) {
        if (key.is_cross()) continue;
        int c = key.man_single() ? key.man : mk.couple_of_woman(key.woman);
        if (!committed.is_committed(c)) add_geq0(v, e);
      }
      std::vector<PathOfRemarriages> all;
      if (!paths) {
        all = enumerate_permissible_paths(
            mk.n_couples(),
            [&] {
              std::vector<int> wife(mk.n_couples());
              for (int c = 0; c < mk.n_couples(); ++c) wife[c] = mk.wife_of(c);
              return wife;
            }(),
            committed, effective_path_len(mk, opts));
        paths = &all;
      }
      int pi = 0;
      for (const PathOfRemarriages& path : *paths) {
        double M = opts.big_m.value_or(0.0);
        if (!opts.big_m) {
          for (const PairKey& edge : path.edges)
            M += magnitude_bound(v.prog, exprs.at(edge)) + 1.0;
        }
        std::string tag = "_p" + std::to_string(pi++);
        int wp = v.prog.add_variable("w" + tag, 0, 1, lp::VarKind::Binary);
        Row cover{{wp, 1.0}};
        int ei = 0;
        for (const PairKey& edge : path.edges) {
          int z = v.prog.add_variable("z" + tag + "_e" + std::to_string(ei++), 0, 1,
                                      lp::VarKind::Binary);
          cover.emplace_back(z, 1.0);
          Affine strict = exprs.at(edge);  // a ≥ ε − M(1−z)
          strict.row.emplace_back(z, -M);
          add_geq0(v, strict, opts.eps - M);
          Affine weak = exprs.at(edge);    // a ≥ −M(1−w_P)
          weak.row.emplace_back(wp, -M);
          add_geq0(v, weak, -M);
        }
        v.prog.add_constraint(std::move(cover), lp::Relation::GreaterEq, 1.0);
      }
      break;
    }
  }

  if (opts.with_indices) {
    Row obj;
    for (const auto& [key, idx] : v.s) {
      (void)key;
      obj.emplace_back(idx, 1.0);
    }
    v.prog.set_objective(std::move(obj), lp::Sense::Maximize);
  }
  return std::move(v.prog);
}

}  // namespace

lp::FeasibilityProgram build_program(const Market& mk, const Regime& regime,
                                     const BuildOptions& opts) {
  return build_impl(mk, regime, opts, nullptr);
}

lp::FeasibilityProgram build_transfer_potential_program(const EdgeMatrix& em,
                                                        const CommittedSet& committed) {
  lp::FeasibilityProgram prog;
  std::map<int, int> t;
  for (int c = 0; c < em.n_couples; ++c)
    if (committed.is_committed(c))
      t[c] = prog.add_variable(detail::t_var(c), -lp::kInf, lp::kInf);
  for (const auto& [key, a] : em.weights) {
    if (key.is_cross()) {
      Row row;
      int cm = key.man, cw = em.couple_of_woman(key.woman);
      if (auto it = t.find(cm); it != t.end()) row.emplace_back(it->second, 1.0);
      if (auto it = t.find(cw); it != t.end()) row.emplace_back(it->second, -1.0);
      prog.add_constraint(std::move(row), lp::Relation::GreaterEq, -a);
    } else {
      int c = key.man_single() ? key.man : em.couple_of_woman(key.woman);
      if (!committed.is_committed(c) && a < 0)
        prog.add_constraint({}, lp::Relation::GreaterEq, -a);  // constant row: infeasible
    }
  }
  return prog;
}

AllocationCandidate candidate_from_solution(const Market& mk, const lp::Solution& sol) {
  AllocationCandidate cand;
  const int C = mk.n_couples();
  cand.q_m.assign(C, Vec(mk.n_private, 0.0));
  cand.q_w.assign(C, Vec(mk.n_private, 0.0));
  for (int c = 0; c < C; ++c)
    for (int k = 0; k < mk.n_private; ++k) {
      double q = sol.at(detail::qm_var(c, k));
      cand.q_m[c][k] = q;
      cand.q_w[c][k] = mk.q_obs[c][k] - q;
    }
  bool any_t = false, any_s = false;
  std::vector<double> t(C, 0.0);
  std::map<PairKey, double> s;
  for (const PairKey& key : potential_pairs(mk)) {
    if (key.is_cross()) {
      Vec pm(mk.n_public), pw(mk.n_public);
      for (int j = 0; j < mk.n_public; ++j) {
        pm[j] = sol.at(detail::pm_var(key, j));
        pw[j] = mk.P.at(key)[j] - pm[j];
      }
      cand.Pm[key] = std::move(pm);
      cand.Pw[key] = std::move(pw);
    }
    if (auto it = sol.values.find(detail::s_var(key)); it != sol.values.end()) {
      s[key] = it->second;
      any_s = true;
    }
  }
  for (int c = 0; c < C; ++c)
    if (auto it = sol.values.find(detail::t_var(c)); it != sol.values.end()) {
      t[c] = it->second;
      any_t = true;
    }
  if (any_t) cand.transfers = std::move(t);
  if (any_s) cand.s = std::move(s);
  return cand;
}

namespace {

/// True when the solution genuinely satisfies the structure's disjunction:
/// some edge ≥ ε, or every edge ≥ 0 (both within feas_tol).
bool path_satisfied(const PathOfRemarriages& path, const EdgeMatrix& em, double eps,
                    double tol) {
  bool all_weak = true, any_strict = false;
  for (const PairKey& e : path.edges) {
    double a = em.at(e);
    if (a >= eps - tol) any_strict = true;
    if (a < -tol) all_weak = false;
  }
  return any_strict || all_weak;
}

struct LazyOutcome {
  lp::Solution solution;        // last MILP solution (may be the seed)
  AllocationCandidate candidate;
  bool used_seed = false;       // true when the seed stayed optimal
  bool feasible = false;
  bool limit = false;
  std::string detail;
};

/// Lazy structure generation for the NoTransfers regime: start from no path
/// constraints, separate violated structures at each MILP optimum, repeat.
/// seed: a known-feasible solution (from the Transfers regime) or nullopt.
LazyOutcome solve_no_transfers(const Market& mk, const Regime& regime,
                               const SolveSettings& st,
                               const std::optional<lp::Solution>& seed) {
  const CommittedSet committed = regime.effective_committed(mk);
  std::vector<int> wife(mk.n_couples());
  for (int c = 0; c < mk.n_couples(); ++c) wife[c] = mk.wife_of(c);
  BuildOptions bo = st.build;
  const std::vector<PathOfRemarriages> universe =
      enumerate_permissible_paths(mk.n_couples(), wife, committed,
                                  effective_path_len(mk, bo));

  LazyOutcome out;
  std::optional<double> incumbent_obj;
  if (seed && seed->objective_value) incumbent_obj = *seed->objective_value;

  std::vector<PathOfRemarriages> active;
  std::set<size_t> active_idx;
  Regime nt = regime;
  for (int round = 0; round <= static_cast<int>(universe.size()); ++round) {
    lp::FeasibilityProgram prog = build_impl(mk, nt, bo, &active);
    lp::SolveOptions lo = st.lp;
    lo.incumbent = incumbent_obj;
    lp::Solution sol = lp::solve(prog, lo);

    if (sol.status == lp::Status::NumericalFailure) {
      out.limit = true;
      out.detail = sol.detail;
      if (seed) {  // fall back to the known-feasible seed
        out.solution = *seed;
        out.candidate = candidate_from_solution(mk, *seed);
        out.used_seed = true;
        out.feasible = true;
      }
      return out;
    }
    if (sol.status == lp::Status::Infeasible) {
      // The lazy program is a relaxation, so the full program is infeasible.
      if (seed) throw std::logic_error("seed feasible but relaxation infeasible");
      return out;
    }
    if (sol.values.empty()) {
      // No node beat the seeded incumbent: the seed is optimal.
      out.solution = *seed;
      out.candidate = candidate_from_solution(mk, *seed);
      out.used_seed = true;
      out.feasible = true;
      return out;
    }

    AllocationCandidate cand = candidate_from_solution(mk, sol);
    EdgeMatrix em = build_edge_matrix(mk, cand, st.lp.feas_tol);
    bool violated = false;
    for (size_t i = 0; i < universe.size(); ++i) {
      if (active_idx.count(i)) continue;
      if (!path_satisfied(universe[i], em, bo.eps, st.lp.feas_tol)) {
        active.push_back(universe[i]);
        active_idx.insert(i);
        violated = true;
      }
    }
    if (!violated) {
      out.solution = std::move(sol);
      out.candidate = std::move(cand);
      out.feasible = true;
      return out;
    }
  }
  out.limit = true;
  out.detail = "lazy structure generation did not converge";
  return out;
}

}  // namespace

IndexReport compute_stability_indices(const Market& mk, const Regime& regime,
                                      const SolveSettings& settings) {
  SolveSettings st = settings;
  st.build.with_indices = true;
  IndexReport rep;

  auto finish = [&](const lp::Solution& sol) {
    rep.status = sol.status;
    rep.detail = sol.detail;
    if (sol.status != lp::Status::Optimal) return;
    rep.candidate = candidate_from_solution(mk, sol);
    double sum = 0.0;
    int count = 0;
    for (const PairKey& key : potential_pairs(mk)) {
      double val = sol.at(detail::s_var(key));
      rep.s[key] = val;
      sum += val;
      ++count;
    }
    rep.average = count ? sum / count : 1.0;
  };

  if (regime.kind != RegimeKind::MutualConsentNoTransfers) {
    lp::FeasibilityProgram prog = build_program(mk, regime, st.build);
    lp::Solution sol = lp::solve(prog, st.lp);
    if (sol.status == lp::Status::Infeasible)
      throw std::logic_error("index program infeasible; s = 0 should always be feasible");
    finish(sol);
    return rep;
  }

  // Seed with the Transfers optimum over the same committed set (nesting
  // makes it feasible here and its objective a valid incumbent).
  Regime transfers = regime;
  transfers.kind = RegimeKind::MutualConsentTransfers;
  lp::FeasibilityProgram tprog = build_program(mk, transfers, st.build);
  lp::Solution tsol = lp::solve(tprog, st.lp);
  std::optional<lp::Solution> seed;
  if (tsol.status == lp::Status::Optimal) seed = std::move(tsol);

  LazyOutcome lazy = solve_no_transfers(mk, regime, st, seed);
  if (!lazy.feasible) {
    rep.status = lp::Status::NumericalFailure;
    rep.detail = lazy.detail.empty() ? "no feasible point found" : lazy.detail;
    return rep;
  }
  rep.status = lp::Status::Optimal;
  rep.detail = lazy.limit
                   ? "time limit; transfers-regime solution reported: " + lazy.detail
                   : lazy.detail;
  rep.candidate = lazy.candidate;
  double sum = 0.0;
  int count = 0;
  for (const PairKey& key : potential_pairs(mk)) {
    double val = lazy.solution.at(detail::s_var(key));
    rep.s[key] = val;
    sum += val;
    ++count;
  }
  rep.average = count ? sum / count : 1.0;
  return rep;
}

CheckResult check_rationalizable(const Market& mk, const Regime& regime,
                                 const SolveSettings& settings) {
  SolveSettings st = settings;
  st.build.with_indices = false;
  CheckResult res;

  auto attach_counterexample = [&] {
    // Best effort: evaluate the structure search at the index-maximizing
    // candidate with s forced back to 1.
    try {
      IndexReport rep = compute_stability_indices(mk, regime, settings);
      if (rep.status != lp::Status::Optimal) return;
      AllocationCandidate cand = rep.candidate;
      cand.s.reset();
      EdgeMatrix em = build_edge_matrix(mk, cand, st.build.eps);
      BlockingMode mode = regime.kind == RegimeKind::MutualConsentTransfers
                              ? BlockingMode::Monotonicity
                              : BlockingMode::Consistency;
      res.counterexample = find_blocking_structure(em, regime.effective_committed(mk), mode);
    } catch (const std::exception&) {
      // leave the counterexample empty
    }
  };

  if (regime.kind != RegimeKind::MutualConsentNoTransfers) {
    lp::FeasibilityProgram prog = build_program(mk, regime, st.build);
    lp::Solution sol = lp::solve(prog, st.lp);
    res.status = sol.status;
    res.detail = sol.detail;
    if (sol.status == lp::Status::Optimal) {
      res.verdict = true;
      res.witness = candidate_from_solution(mk, sol);
    } else if (sol.status == lp::Status::Infeasible) {
      res.verdict = false;
      attach_counterexample();
    }
    return res;
  }

  // Transfers feasibility implies NoTransfers feasibility (regime nesting).
  Regime transfers = regime;
  transfers.kind = RegimeKind::MutualConsentTransfers;
  lp::FeasibilityProgram tprog = build_program(mk, transfers, st.build);
  lp::Solution tsol = lp::solve(tprog, st.lp);
  if (tsol.status == lp::Status::Optimal) {
    res.status = tsol.status;
    res.verdict = true;
    res.witness = candidate_from_solution(mk, tsol);
    return res;
  }

  LazyOutcome lazy = solve_no_transfers(mk, regime, st, std::nullopt);
  if (lazy.limit) {
    res.status = lp::Status::NumericalFailure;
    res.detail = lazy.detail;
    return res;
  }
  if (lazy.feasible) {
    res.status = lp::Status::Optimal;
    res.verdict = true;
    res.witness = lazy.candidate;
  } else {
    res.status = lp::Status::Infeasible;
    res.verdict = false;
    attach_counterexample();
  }
  return res;
}

}  // namespace marstab
