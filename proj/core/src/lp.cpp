#include "marstab/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace marstab::lp {

int FeasibilityProgram::add_variable(std::string id, double lower, double upper,
                                     VarKind kind) {
  if (index_.count(id)) throw std::invalid_argument("duplicate variable id: " + id);
  if (kind == VarKind::Binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (lower > upper) throw std::invalid_argument("lower > upper for " + id);
  int idx = n_variables();
  index_[id] = idx;
  ids_.push_back(std::move(id));
  lower_.push_back(lower);
  upper_.push_back(upper);
  kind_.push_back(kind);
  return idx;
}

void FeasibilityProgram::add_constraint(Row row, Relation rel, double rhs) {
  for (const auto& [v, c] : row) {
    (void)c;
    if (v < 0 || v >= n_variables())
      throw std::invalid_argument("constraint references unknown variable " +
                                  std::to_string(v));
  }
  constraints_.push_back({std::move(row), rel, rhs});
}

void FeasibilityProgram::set_objective(Row row, Sense sense) {
  for (const auto& [v, c] : row) {
    (void)c;
    if (v < 0 || v >= n_variables())
      throw std::invalid_argument("objective references unknown variable " +
                                  std::to_string(v));
  }
  objective_ = Objective{std::move(row), sense};
}

int FeasibilityProgram::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

bool FeasibilityProgram::has_binaries() const {
  return std::any_of(kind_.begin(), kind_.end(),
                     [](VarKind k) { return k == VarKind::Binary; });
}

void FeasibilityProgram::set_bounds(int var, double lower, double upper) {
  lower_[var] = lower;
  upper_[var] = upper;
}

bool backend_supports_milp() { return true; }

namespace {

Solution pack(const FeasibilityProgram& prog, const detail::LpResult& r) {
  Solution s;
  s.status = r.status;
  s.detail = r.detail;
  if (r.status == Status::Optimal) {
    for (int j = 0; j < prog.n_variables(); ++j) s.values[prog.id_of(j)] = r.x[j];
    if (prog.objective()) s.objective_value = r.objective;
  }
  return s;
}

/// Depth-first branch and bound over the binary variables.
Solution solve_milp(const FeasibilityProgram& prog, const SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    return opts.time_limit_seconds -
           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const bool maximize = !prog.objective() || prog.objective()->sense == Sense::Maximize;
  auto better = [&](double a, double b) { return maximize ? a > b + 1e-12 : a < b - 1e-12; };

  std::vector<int> binaries;
  for (int j = 0; j < prog.n_variables(); ++j)
    if (prog.kind(j) == VarKind::Binary) binaries.push_back(j);

  struct Node {
    std::vector<std::pair<int, int>> fixes;  // (variable, value 0/1)
  };
  std::vector<Node> stack{{}};
  std::optional<detail::LpResult> incumbent;
  std::optional<double> bound = opts.incumbent;
  bool hit_limit = false;
  FeasibilityProgram work = prog;  // bounds mutated per node, then restored

  while (!stack.empty()) {
    if (remaining() <= 0) {
      hit_limit = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();

    for (auto [v, b] : node.fixes) work.set_bounds(v, b, b);
    detail::LpResult r = detail::solve_relaxation(work, opts.feas_tol, remaining());
    for (auto [v, b] : node.fixes) {
      (void)b;
      work.set_bounds(v, prog.lower(v), prog.upper(v));
    }

    if (r.status == Status::NumericalFailure) {
      hit_limit = true;
      break;
    }
    if (r.status == Status::Infeasible) continue;
    if (r.status == Status::Unbounded) {
      // Unbounded relaxation at the root means the MILP is unbounded or
      // infeasible; report unbounded (our programs never hit this).
      return pack(prog, r);
    }
    if (bound && !better(r.objective, *bound)) continue;

    int branch = -1;
    double frac_best = opts.int_tol;
    for (int v : binaries) {
      double f = std::abs(r.x[v] - std::round(r.x[v]));
      if (f > frac_best) {
        frac_best = f;
        branch = v;
      }
    }
    if (branch < 0) {  // integral: new incumbent
      incumbent = r;
      bound = r.objective;
      continue;
    }
    // Explore the rounded side first (DFS pushes it last).
    int first = r.x[branch] >= 0.5 ? 1 : 0;
    Node a = node, b = node;
    a.fixes.emplace_back(branch, 1 - first);
    b.fixes.emplace_back(branch, first);
    stack.push_back(std::move(a));
    stack.push_back(std::move(b));
  }

  if (incumbent) {
    for (int v : binaries) incumbent->x[v] = std::round(incumbent->x[v]);
    Solution s = pack(prog, *incumbent);
    if (hit_limit) s.detail = "time limit; best incumbent returned";
    return s;
  }
  if (hit_limit)
    return {Status::NumericalFailure, {}, std::nullopt, "time limit before any incumbent"};
  if (bound && opts.incumbent)
    return {Status::Optimal, {}, *opts.incumbent,
            "no node beat the supplied incumbent; values from the caller's solution apply"};
  return {Status::Infeasible, {}, std::nullopt, ""};
}

}  // namespace

Solution solve(const FeasibilityProgram& prog, const SolveOptions& opts) {
  if (prog.has_binaries()) return solve_milp(prog, opts);
  detail::LpResult r =
      detail::solve_relaxation(prog, opts.feas_tol, opts.time_limit_seconds);
  return pack(prog, r);
}

namespace {

void write_row(std::ostringstream& os, const Row& row) {
  bool first = true;
  for (const auto& [v, c] : row) {
    if (c == 0.0) continue;
    if (first) {
      os << (c < 0 ? "- " : "");
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    double a = std::abs(c);
    if (a != 1.0) os << a << " ";
    os << "x" << v;
  }
  if (first) os << "0 x0";
}

}  // namespace

std::string write_lp_format(const FeasibilityProgram& prog) {
  std::ostringstream os;
  os.precision(17);
  if (prog.objective()) {
    os << (prog.objective()->sense == Sense::Maximize ? "Maximize" : "Minimize") << "\n obj: ";
    write_row(os, prog.objective()->row);
    os << "\n";
  } else {
    os << "Minimize\n obj: 0 x0\n";
  }
  os << "Subject To\n";
  int i = 0;
  for (const Constraint& c : prog.constraints()) {
    os << " c" << i++ << ": ";
    write_row(os, c.row);
    switch (c.rel) {
      case Relation::LessEq: os << " <= "; break;
      case Relation::Equal: os << " = "; break;
      case Relation::GreaterEq: os << " >= "; break;
    }
    os << c.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < prog.n_variables(); ++j) {
    double lo = prog.lower(j), up = prog.upper(j);
    os << " ";
    if (lo == -kInf) os << "-inf"; else os << lo;
    os << " <= x" << j << " <= ";
    if (up == kInf) os << "+inf"; else os << up;
    os << "\n";
  }
  bool any_bin = prog.has_binaries();
  if (any_bin) {
    os << "Binary\n";
    for (int j = 0; j < prog.n_variables(); ++j)
      if (prog.kind(j) == VarKind::Binary) os << " x" << j << "\n";
  }
  os << "End\n";
  // Variable ids as comments, keyed to the xN names used above.
  os << "\\ name map:\n";
  for (int j = 0; j < prog.n_variables(); ++j)
    os << "\\ x" << j << " = " << prog.id_of(j) << "\n";
  return os.str();
}

}  // namespace marstab::lp
