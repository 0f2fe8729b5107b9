#include "marstab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "marstab/lp.hpp"

namespace marstab::oracle {

double CandidateUtility::value(const Vec& q, const Vec& Q) const {
  auto v = [&](double x) { return std::min(slope_high * x, slope_low * x); };
  double u = 0.0;
  for (size_t k = 0; k < q_ref.size(); ++k) u += v(q[k] - q_ref[k]);
  for (size_t j = 0; j < Q_ref.size(); ++j) u += v(Q[j] - Q_ref[j]);
  return u;
}

namespace {

std::pair<double, double> price_extrema(const Market& mk) {
  double lo = lp::kInf, hi = 0.0;
  auto scan = [&](const std::map<PairKey, Vec>& prices) {
    for (const auto& [key, vec] : prices) {
      (void)key;
      for (double x : vec) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  };
  scan(mk.p);
  scan(mk.P);
  return {lo, hi};
}

}  // namespace

CandidateUtility make_candidate_utility(const Market& mk, Vec q_ref, Vec Q_ref) {
  auto [lo, hi] = price_extrema(mk);
  CandidateUtility u;
  u.q_ref = std::move(q_ref);
  u.Q_ref = std::move(Q_ref);
  u.slope_low = 0.5 * lo;
  u.slope_high = 2.0 * hi + 1.0;
  return u;
}

namespace {

std::vector<Coalition> enumerate_with(const Market& mk, const CommittedSet& committed) {
  const int C = mk.n_couples();
  if (C > 4) throw TooLarge("coalition enumeration capped at 4 couples, got " +
                            std::to_string(C));
  std::vector<Coalition> out;
  const int bits = 2 * C;  // bit m: man m; bit C + w: woman w

  for (int mask = 1; mask < (1 << bits); ++mask) {
    std::vector<int> men, women;
    for (int m = 0; m < C; ++m)
      if (mask & (1 << m)) men.push_back(m);
    for (int w = 0; w < C; ++w)
      if (mask & (1 << (C + w))) women.push_back(w);

    // Assign each man to the single option or an unused subset woman other
    // than his current wife; unassigned women go single.
    std::vector<int> target(men.size(), -2);
    std::vector<bool> taken(women.size(), false);
    auto emit = [&] {
      Coalition co;
      for (int m : men) co.members.push_back(AgentId::man(m));
      for (int w : women) co.members.push_back(AgentId::woman(w));
      for (size_t i = 0; i < men.size(); ++i)
        co.rematch[AgentId::man(men[i])] =
            target[i] < 0 ? AgentId::empty() : AgentId::woman(target[i]);
      for (int w : women) co.rematch[AgentId::woman(w)] = AgentId::empty();
      for (size_t i = 0; i < men.size(); ++i)
        if (target[i] >= 0) co.rematch[AgentId::woman(target[i])] = AgentId::man(men[i]);
      if (coalition_is_permissible(co, mk.matching, committed)) out.push_back(std::move(co));
    };
    auto rec = [&](auto&& self, size_t i) -> void {
      if (i == men.size()) {
        emit();
        return;
      }
      target[i] = -1;  // single
      self(self, i + 1);
      for (size_t wi = 0; wi < women.size(); ++wi) {
        if (taken[wi] || women[wi] == mk.wife_of(men[i])) continue;
        taken[wi] = true;
        target[i] = women[wi];
        self(self, i + 1);
        taken[wi] = false;
      }
      target[i] = -2;
    };
    rec(rec, 0);
  }
  return out;
}

}  // namespace

std::vector<Coalition> enumerate_permissible_coalitions(const Market& mk) {
  return enumerate_with(mk, mk.committed);
}

std::optional<Coalition> blocking_coalition_exists(const Market& mk,
                                                   const AllocationCandidate& cand,
                                                   const Regime& regime, double eps) {
  const CommittedSet committed = regime.effective_committed(mk);
  const EdgeMatrix em = build_edge_matrix(mk, cand, eps);
  const bool transfers = regime.kind == RegimeKind::MutualConsentTransfers;
  const bool mutual = regime.kind != RegimeKind::Unilateral;

  for (const Coalition& co : enumerate_with(mk, committed)) {
    if (mutual) {
      bool skip = false;
      for (const auto& [a, b] : co.rematch) {
        if (!b.is_empty()) continue;
        int couple = a.side == Side::Man ? a.index : mk.couple_of_woman(a.index);
        if (committed.is_committed(couple)) skip = true;
      }
      if (skip) continue;  // committed members going single: out of scope
    }

    // Rematch edges: cross pairs once (via the man) plus single options.
    std::vector<PairKey> cross;
    std::vector<double> single_weights;
    for (const auto& [a, b] : co.rematch) {
      if (a.side == Side::Man) {
        if (b.is_empty())
          single_weights.push_back(em.at(man_single(a.index)));
        else
          cross.push_back(cross_pair(a.index, b.index));
      } else if (b.is_empty()) {
        single_weights.push_back(em.at(woman_single(a.index)));
      }
    }

    bool blocks;
    if (!transfers) {
      bool all_weak = true, any_strict = false;
      auto eat = [&](double a) {
        if (a > eps) all_weak = false;
        if (a <= -eps) any_strict = true;
      };
      for (const PairKey& k : cross) eat(em.at(k));
      for (double a : single_weights) eat(a);
      blocks = all_weak && any_strict;
    } else {
      // Component sums: maximal chains/cycles of cross edges, plus each
      // single option on its own.
      std::map<int, std::pair<int, double>> out_edge;  // couple -> (to, weight)
      std::set<int> has_in;
      for (const PairKey& k : cross) {
        int from = k.man, to = mk.couple_of_woman(k.woman);
        out_edge[from] = {to, em.at(k)};
        has_in.insert(to);
      }
      std::vector<double> sums(single_weights);
      std::set<int> visited;
      for (const auto& [start, first] : out_edge) {
        (void)first;
        if (has_in.count(start) || visited.count(start)) continue;
        double sum = 0.0;  // open chain
        for (int v = start; out_edge.count(v) && !visited.count(v);) {
          visited.insert(v);
          sum += out_edge[v].second;
          v = out_edge[v].first;
        }
        sums.push_back(sum);
      }
      for (const auto& [start, first] : out_edge) {  // remaining: cycles
        (void)first;
        if (visited.count(start)) continue;
        double sum = 0.0;
        for (int v = start; !visited.count(v);) {
          visited.insert(v);
          sum += out_edge[v].second;
          v = out_edge[v].first;
        }
        sums.push_back(sum);
      }
      bool all_weak = true, any_strict = false;
      for (double s : sums) {
        if (s > eps) all_weak = false;
        if (s <= -eps) any_strict = true;
      }
      blocks = all_weak && any_strict;
    }
    if (blocks) return co;
  }
  return std::nullopt;
}

bool candidate_utility_block_check(const Market& mk, const AllocationCandidate& cand,
                                   const PairKey& pair) {
  const int cm = pair.man;
  const int cw = mk.couple_of_woman(pair.woman);
  CandidateUtility um = make_candidate_utility(mk, cand.q_m[cm], mk.Q_obs[cm]);
  CandidateUtility uw = make_candidate_utility(mk, cand.q_w[cw], mk.Q_obs[cw]);

  lp::FeasibilityProgram prog;
  const int n = mk.n_private, N = mk.n_public;
  std::vector<int> qm(n), qw(n), Q(N);
  for (int k = 0; k < n; ++k) qm[k] = prog.add_variable("qm" + std::to_string(k), 0, lp::kInf);
  for (int k = 0; k < n; ++k) qw[k] = prog.add_variable("qw" + std::to_string(k), 0, lp::kInf);
  for (int j = 0; j < N; ++j) Q[j] = prog.add_variable("Q" + std::to_string(j), 0, lp::kInf);

  // Hypograph of v per coordinate: v ≤ slope · (x − ref) for both slopes.
  auto hypo = [&](const std::string& name, int xvar, double ref, const CandidateUtility& u) {
    int v = prog.add_variable(name, -lp::kInf, lp::kInf);
    prog.add_constraint({{v, 1.0}, {xvar, -u.slope_high}}, lp::Relation::LessEq,
                        -u.slope_high * ref);
    prog.add_constraint({{v, 1.0}, {xvar, -u.slope_low}}, lp::Relation::LessEq,
                        -u.slope_low * ref);
    return v;
  };
  lp::Row util_m, util_w, obj;
  for (int k = 0; k < n; ++k)
    util_m.emplace_back(hypo("vm" + std::to_string(k), qm[k], um.q_ref[k], um), 1.0);
  for (int j = 0; j < N; ++j)
    util_m.emplace_back(hypo("vmQ" + std::to_string(j), Q[j], um.Q_ref[j], um), 1.0);
  for (int k = 0; k < n; ++k)
    util_w.emplace_back(hypo("vw" + std::to_string(k), qw[k], uw.q_ref[k], uw), 1.0);
  for (int j = 0; j < N; ++j)
    util_w.emplace_back(hypo("vwQ" + std::to_string(j), Q[j], uw.Q_ref[j], uw), 1.0);

  lp::Row budget;
  const Vec& p = mk.p.at(pair);
  const Vec& P = mk.P.at(pair);
  for (int k = 0; k < n; ++k) {
    budget.emplace_back(qm[k], p[k]);
    budget.emplace_back(qw[k], p[k]);
  }
  for (int j = 0; j < N; ++j) budget.emplace_back(Q[j], P[j]);
  prog.add_constraint(std::move(budget), lp::Relation::LessEq, mk.y.at(pair));

  prog.add_constraint(util_m, lp::Relation::GreaterEq, 0.0);
  prog.add_constraint(util_w, lp::Relation::GreaterEq, 0.0);
  obj = util_m;
  obj.insert(obj.end(), util_w.begin(), util_w.end());
  prog.set_objective(std::move(obj), lp::Sense::Maximize);

  lp::Solution sol = lp::solve(prog);
  return sol.status == lp::Status::Optimal && *sol.objective_value > 1e-9;
}

bool grid_search_rationalizability(const Market& mk, int grid_steps, const Regime& regime,
                                   double eps) {
  const int C = mk.n_couples();
  if (C > 3 || mk.n_private > 2 || mk.n_public > 1)
    throw TooLarge("grid search limited to 3 couples, n <= 2, N <= 1");
  if (grid_steps < 1) throw std::invalid_argument("grid_steps must be >= 1");

  const int dims = C * mk.n_private;
  double points = std::pow(static_cast<double>(grid_steps), dims);
  if (points > 5e6) throw TooLarge("grid too fine: " + std::to_string(points) + " points");

  AllocationCandidate cand;
  cand.q_m.assign(C, Vec(mk.n_private, 0.0));
  cand.q_w.assign(C, Vec(mk.n_private, 0.0));
  // Lindahl split at the non-blocking-optimal corner: give the whole public
  // price to whichever side has the larger observed public bundle.
  for (const PairKey& key : potential_pairs(mk)) {
    if (!key.is_cross()) continue;
    int cm = key.man, cw = mk.couple_of_woman(key.woman);
    const Vec& P = mk.P.at(key);
    Vec pm(mk.n_public), pw(mk.n_public);
    for (int j = 0; j < mk.n_public; ++j) {
      bool to_man = mk.Q_obs[cm][j] >= mk.Q_obs[cw][j];
      pm[j] = to_man ? P[j] : 0.0;
      pw[j] = P[j] - pm[j];
    }
    cand.Pm[key] = std::move(pm);
    cand.Pw[key] = std::move(pw);
  }

  auto share_at = [&](int c, int k, int step) {
    double q = mk.q_obs[c][k];
    return grid_steps == 1 ? 0.5 * q : q * step / (grid_steps - 1);
  };
  auto within_assignable = [&](int c, int k, double share) {
    double lo = mk.assignable_m ? (*mk.assignable_m)[c][k] : 0.0;
    double hi = mk.q_obs[c][k] - (mk.assignable_w ? (*mk.assignable_w)[c][k] : 0.0);
    return share >= lo - 1e-12 && share <= hi + 1e-12;
  };

  std::vector<int> odo(dims, 0);
  for (;;) {
    bool ok = true;
    for (int d = 0; d < dims && ok; ++d) {
      int c = d / mk.n_private, k = d % mk.n_private;
      double share = share_at(c, k, odo[d]);
      if (!within_assignable(c, k, share)) ok = false;
      cand.q_m[c][k] = share;
      cand.q_w[c][k] = mk.q_obs[c][k] - share;
    }
    if (ok && !blocking_coalition_exists(mk, cand, regime, eps)) return true;

    int d = 0;
    while (d < dims && ++odo[d] == grid_steps) odo[d++] = 0;
    if (d == dims) break;
  }
  return false;
}

std::vector<double> telescoped_transfers(const PathOfRemarriages& path,
                                         const EdgeMatrix& em) {
  const size_t k = path.couples.size();
  std::vector<double> t(k, 0.0);
  for (size_t j = 1; j + 1 < k; ++j) t[j] = em.at(path.edges[j - 1]) + t[j - 1];
  // Endpoints stay 0: the final edge then carries the whole structure sum.
  return t;
}

}  // namespace marstab::oracle
