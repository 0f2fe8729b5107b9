#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "marstab/lp.hpp"

// Bounded-variable two-phase primal simplex on a dense tableau. Sized for the
// programs this library emits (a few thousand columns); not a general solver.

namespace marstab::lp::detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr size_t kCellBudget = 400'000'000;  // tableau cells, ~3.2 GB

enum class VStat { Basic, AtLower, AtUpper, FreeZero };

struct Tableau {
  int rows = 0, cols = 0;
  std::vector<std::vector<double>> T;  // rows x cols, equals B^{-1} A
  std::vector<double> obj;             // reduced costs, length cols
  std::vector<double> lo, up, val;     // per column
  std::vector<VStat> stat;
  std::vector<int> basis;              // row -> column

  double& a(int r, int c) { return T[r][c]; }

  void pivot(int r, int c) {
    double piv = T[r][c];
    for (double& x : T[r]) x /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      double f = T[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) T[i][j] -= f * T[r][j];
    }
    double f = obj[c];
    if (f != 0.0)
      for (int j = 0; j < cols; ++j) obj[j] -= f * T[r][j];
  }

  /// Rebuilds reduced costs for cost vector c given the current basis.
  void price(const std::vector<double>& c) {
    obj = c;
    for (int r = 0; r < rows; ++r) {
      double cb = c[basis[r]];
      if (cb == 0.0) continue;
      for (int j = 0; j < cols; ++j) obj[j] -= cb * T[r][j];
    }
  }
};

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double limit;
  explicit Clock(double s) : limit(s) {}
  bool expired() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
           limit;
  }
};

/// Minimizes obj over the tableau's feasible set. Returns Optimal, Unbounded,
/// or NumericalFailure (iteration or time limit).
Status run_simplex(Tableau& t, double feas_tol, const Clock& clock) {
  const long max_iter = 20'000 + 200L * (t.rows + t.cols);
  long degenerate_streak = 0;
  bool bland = false;

  for (long iter = 0; iter < max_iter; ++iter) {
    if ((iter & 127) == 0 && clock.expired()) return Status::NumericalFailure;

    // Entering column.
    int enter = -1, dir = 0;
    double best = feas_tol;
    for (int j = 0; j < t.cols; ++j) {
      double d = t.obj[j];
      int cand_dir = 0;
      switch (t.stat[j]) {
        case VStat::Basic:
          continue;
        case VStat::AtLower:
          if (d < -feas_tol) cand_dir = +1;
          break;
        case VStat::AtUpper:
          if (d > feas_tol) cand_dir = -1;
          break;
        case VStat::FreeZero:
          if (d < -feas_tol) cand_dir = +1;
          else if (d > feas_tol) cand_dir = -1;
          break;
      }
      if (!cand_dir) continue;
      if (bland) {
        enter = j;
        dir = cand_dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        enter = j;
        dir = cand_dir;
      }
    }
    if (enter < 0) return Status::Optimal;

    // Ratio test: entering moves by step ≥ 0; basic i changes by -dir*T[i][enter].
    double step = t.up[enter] - t.lo[enter];  // bound-flip limit (inf for free)
    int leave_row = -1;
    double leave_to_upper = false;
    for (int i = 0; i < t.rows; ++i) {
      double coef = dir * t.a(i, enter);
      if (std::abs(coef) < kPivotTol) continue;
      int b = t.basis[i];
      double room, lim;
      if (coef > 0) {  // basic decreases toward its lower bound
        if (t.lo[b] == -kInf) continue;
        room = t.val[b] - t.lo[b];
        lim = room / coef;
      } else {  // basic increases toward its upper bound
        if (t.up[b] == kInf) continue;
        room = t.up[b] - t.val[b];
        lim = room / (-coef);
      }
      if (lim < step - 1e-12 ||
          (bland && leave_row >= 0 && std::abs(lim - step) <= 1e-12 &&
           t.basis[i] < t.basis[leave_row]) ||
          (!bland && leave_row >= 0 && std::abs(lim - step) <= 1e-12 &&
           std::abs(t.a(i, enter)) > std::abs(t.a(leave_row, enter)))) {
        step = std::max(lim, 0.0);
        leave_row = i;
        leave_to_upper = coef < 0;
      }
    }

    if (step == kInf || (leave_row < 0 && step == t.up[enter] - t.lo[enter] &&
                         t.up[enter] == kInf))
      return Status::Unbounded;

    if (step <= 1e-12) {
      if (++degenerate_streak > 2L * (t.rows + t.cols)) bland = true;
    } else {
      degenerate_streak = 0;
    }

    // Update primal values.
    for (int i = 0; i < t.rows; ++i) t.val[t.basis[i]] -= dir * step * t.a(i, enter);
    t.val[enter] += dir * step;

    if (leave_row < 0) {  // bound flip
      t.stat[enter] = dir > 0 ? VStat::AtUpper : VStat::AtLower;
      t.val[enter] = dir > 0 ? t.up[enter] : t.lo[enter];
      continue;
    }
    int leaving = t.basis[leave_row];
    t.stat[leaving] = leave_to_upper ? VStat::AtUpper : VStat::AtLower;
    t.val[leaving] = leave_to_upper ? t.up[leaving] : t.lo[leaving];
    t.stat[enter] = VStat::Basic;
    t.basis[leave_row] = enter;
    t.pivot(leave_row, enter);
  }
  return Status::NumericalFailure;
}

}  // namespace

LpResult solve_relaxation(const FeasibilityProgram& prog, double feas_tol,
                          double deadline_seconds) {
  Clock clock(deadline_seconds);
  const int n = prog.n_variables();
  const int m = prog.n_constraints();
  const int cols = n + 2 * m;  // structural + slack + artificial
  if (static_cast<size_t>(m) * cols > kCellBudget)
    return {Status::NumericalFailure, {}, 0.0,
            "program exceeds the dense tableau capacity (" + std::to_string(m) + " rows x " +
                std::to_string(cols) + " cols)"};

  Tableau t;
  t.rows = m;
  t.cols = cols;
  t.T.assign(m, std::vector<double>(cols, 0.0));
  t.lo.assign(cols, 0.0);
  t.up.assign(cols, kInf);
  t.val.assign(cols, 0.0);
  t.stat.assign(cols, VStat::AtLower);
  t.basis.resize(m);

  for (int j = 0; j < n; ++j) {
    t.lo[j] = prog.lower(j);
    t.up[j] = prog.upper(j);
    if (t.lo[j] > t.up[j] + feas_tol)
      return {Status::Infeasible, {}, 0.0, "contradictory bounds on " + prog.id_of(j)};
    if (t.lo[j] == -kInf && t.up[j] == kInf) {
      t.stat[j] = VStat::FreeZero;
      t.val[j] = 0.0;
    } else if (t.lo[j] != -kInf) {
      t.stat[j] = VStat::AtLower;
      t.val[j] = t.lo[j];
    } else {
      t.stat[j] = VStat::AtUpper;
      t.val[j] = t.up[j];
    }
  }

  // Rows: a·x + slack = rhs; slack bounds encode the relation.
  const auto& cons = prog.constraints();
  for (int i = 0; i < m; ++i) {
    for (const auto& [v, c] : cons[i].row) t.a(i, v) += c;
    int s = n + i;
    t.a(i, s) = 1.0;
    switch (cons[i].rel) {
      case Relation::LessEq:    t.lo[s] = 0.0;   t.up[s] = kInf; break;
      case Relation::GreaterEq: t.lo[s] = -kInf; t.up[s] = 0.0;  break;
      case Relation::Equal:     t.lo[s] = 0.0;   t.up[s] = 0.0;  break;
    }
    t.stat[s] = VStat::AtLower;
    t.val[s] = 0.0;
    if (cons[i].rel == Relation::GreaterEq) {
      t.stat[s] = VStat::AtUpper;  // both bounds touch 0; either status works
      t.val[s] = 0.0;
    }
  }

  // Artificial basis absorbing each row's residual at the nonbasic point.
  std::vector<double> phase1(cols, 0.0);
  for (int i = 0; i < m; ++i) {
    double resid = cons[i].rhs;
    for (int j = 0; j < n + m; ++j)
      if (t.a(i, j) != 0.0) resid -= t.a(i, j) * t.val[j];
    int a = n + m + i;
    if (resid < 0.0) {
      for (int j = 0; j < n + m; ++j) t.a(i, j) = -t.a(i, j);
      resid = -resid;
    }
    t.a(i, a) = 1.0;
    t.basis[i] = a;
    t.stat[a] = VStat::Basic;
    t.val[a] = resid;
    phase1[a] = 1.0;
  }

  t.price(phase1);
  Status st = run_simplex(t, feas_tol, clock);
  if (st != Status::Optimal)
    return {Status::NumericalFailure, {}, 0.0,
            st == Status::Unbounded ? "phase 1 unbounded (internal error)"
            : clock.expired()       ? "time limit in phase 1"
                                    : "iteration limit in phase 1"};
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (t.basis[i] >= n + m) infeas += t.val[t.basis[i]];
  if (infeas > std::max(feas_tol, 1e-7) * (1.0 + std::abs(infeas)))
    return {Status::Infeasible, {}, infeas, ""};
  // Pin artificials at zero for phase 2.
  for (int i = 0; i < m; ++i) {
    int a = n + m + i;
    t.lo[a] = t.up[a] = 0.0;
    if (t.stat[a] != VStat::Basic) t.val[a] = 0.0;
  }

  std::vector<double> cost(cols, 0.0);
  double sense = 1.0;
  if (prog.objective()) {
    sense = prog.objective()->sense == Sense::Maximize ? -1.0 : 1.0;
    for (const auto& [v, c] : prog.objective()->row) cost[v] += sense * c;
  }
  t.price(cost);
  st = run_simplex(t, feas_tol, clock);
  if (st == Status::NumericalFailure)
    return {st, {}, 0.0, clock.expired() ? "time limit in phase 2" : "iteration limit in phase 2"};
  if (st == Status::Unbounded) return {st, {}, 0.0, ""};

  LpResult out;
  out.status = Status::Optimal;
  out.x.assign(n, 0.0);
  double obj = 0.0;
  for (int j = 0; j < n; ++j) {
    out.x[j] = t.val[j];
    obj += cost[j] * t.val[j];
  }
  out.objective = sense * obj;  // back to the program's sense
  return out;
}

}  // namespace marstab::lp::detail
