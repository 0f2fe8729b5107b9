#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace marstab::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, Equal, GreaterEq };
enum class VarKind { Continuous, Binary };
enum class Sense { Maximize, Minimize };
enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

/// Sparse row: (variable index, coefficient) pairs.
using Row = std::vector<std::pair<int, double>>;

struct Constraint {
  Row row;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

struct Objective {
  Row row;
  Sense sense = Sense::Maximize;
};

/// A linear or mixed-binary program. Immutable once handed to solve().
class FeasibilityProgram {
 public:
  /// Returns the new variable's index. Binary variables get bounds [0,1].
  int add_variable(std::string id, double lower, double upper,
                   VarKind kind = VarKind::Continuous);
  void add_constraint(Row row, Relation rel, double rhs);
  void set_objective(Row row, Sense sense);

  int n_variables() const { return static_cast<int>(ids_.size()); }
  int n_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::string& id_of(int var) const { return ids_[var]; }
  int index_of(const std::string& id) const;  // -1 when absent
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }
  VarKind kind(int var) const { return kind_[var]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::optional<Objective>& objective() const { return objective_; }
  bool has_binaries() const;

  /// Tightens a variable's bounds in place (used for bound-based warm edits
  /// before solving; the program is still treated as immutable afterwards).
  void set_bounds(int var, double lower, double upper);

 private:
  std::vector<std::string> ids_;
  std::map<std::string, int> index_;
  std::vector<double> lower_, upper_;
  std::vector<VarKind> kind_;
  std::vector<Constraint> constraints_;
  std::optional<Objective> objective_;
};

struct Solution {
  Status status = Status::NumericalFailure;
  std::map<std::string, double> values;  // present iff Optimal
  std::optional<double> objective_value;
  std::string detail;  // diagnostics for NumericalFailure / TimeLimit

  double at(const std::string& id) const { return values.at(id); }
};

struct SolveOptions {
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  double time_limit_seconds = 300.0;
  /// Optional starting incumbent objective for branch and bound, in the
  /// program's own sense; nodes that cannot beat it are pruned.
  std::optional<double> incumbent;
};

Solution solve(const FeasibilityProgram& program, const SolveOptions& opts = {});

/// True: the built-in backend handles binary variables via branch and bound.
bool backend_supports_milp();

/// CPLEX LP text format, for offline debugging with external tools.
std::string write_lp_format(const FeasibilityProgram& program);

namespace detail {
/// Bounded-variable two-phase simplex on the continuous relaxation.
/// Returns status plus a dense solution vector indexed like the program.
struct LpResult {
  Status status;
  std::vector<double> x;
  double objective = 0.0;  // in the program's sense
  std::string detail;
};
LpResult solve_relaxation(const FeasibilityProgram& program, double feas_tol,
                          double deadline_seconds);
}  // namespace detail

}  // namespace marstab::lp
