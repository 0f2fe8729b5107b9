#include <doctest.h>

#include <random>

#include "marstab/lp.hpp"

using namespace marstab::lp;

TEST_CASE("bounded maximization") {
  FeasibilityProgram p;
  int x = p.add_variable("x", 0, kInf);
  p.add_constraint({{x, 1.0}}, Relation::LessEq, 3.0);
  p.set_objective({{x, 1.0}}, Sense::Maximize);
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.at("x") == doctest::Approx(3.0));
  CHECK(*s.objective_value == doctest::Approx(3.0));
}

TEST_CASE("contradictory constraints are infeasible") {
  FeasibilityProgram p;
  int x = p.add_variable("x", -kInf, kInf);
  p.add_constraint({{x, 1.0}}, Relation::GreaterEq, 1.0);
  p.add_constraint({{x, 1.0}}, Relation::LessEq, 0.0);
  CHECK(solve(p).status == Status::Infeasible);
  CHECK(solve(p).values.empty());
}

TEST_CASE("binary integrality rounds down") {
  FeasibilityProgram p;
  int z = p.add_variable("z", 0, 1, VarKind::Binary);
  p.add_constraint({{z, 1.0}}, Relation::LessEq, 0.4);
  p.set_objective({{z, 1.0}}, Sense::Maximize);
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.at("z") == doctest::Approx(0.0));
}

TEST_CASE("unbounded ray is detected") {
  FeasibilityProgram p;
  int x = p.add_variable("x", 0, kInf);
  p.set_objective({{x, 1.0}}, Sense::Maximize);
  CHECK(solve(p).status == Status::Unbounded);
}

TEST_CASE("equalities with free variables") {
  FeasibilityProgram p;
  int x = p.add_variable("x", -kInf, kInf);
  int y = p.add_variable("y", -kInf, kInf);
  p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::Equal, 2.0);
  p.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::Equal, 0.0);
  p.set_objective({{x, 1.0}}, Sense::Minimize);
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.at("x") == doctest::Approx(1.0));
  CHECK(s.at("y") == doctest::Approx(1.0));
}

TEST_CASE("re-solving is deterministic") {
  FeasibilityProgram p;
  std::vector<int> xs;
  for (int i = 0; i < 12; ++i) xs.push_back(p.add_variable("x" + std::to_string(i), 0, 2));
  for (int i = 0; i + 1 < 12; ++i)
    p.add_constraint({{xs[i], 1.0}, {xs[i + 1], 1.0}}, Relation::LessEq, 1.5);
  Row obj;
  for (int v : xs) obj.emplace_back(v, 1.0 + 0.01 * v);
  p.set_objective(obj, Sense::Maximize);

  Solution a = solve(p), b = solve(p);
  REQUIRE(a.status == Status::Optimal);
  CHECK(a.status == b.status);
  CHECK(*a.objective_value == *b.objective_value);
  CHECK(a.values == b.values);
}

TEST_CASE("knapsack-style branch and bound") {
  FeasibilityProgram p;
  int a = p.add_variable("a", 0, 1, VarKind::Binary);
  int b = p.add_variable("b", 0, 1, VarKind::Binary);
  int c = p.add_variable("c", 0, 1, VarKind::Binary);
  p.add_constraint({{a, 5.0}, {b, 4.0}, {c, 3.0}}, Relation::LessEq, 10.0);
  p.set_objective({{a, 10.0}, {b, 6.0}, {c, 4.0}}, Sense::Maximize);
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(*s.objective_value == doctest::Approx(16.0));
  CHECK(s.at("a") == doctest::Approx(1.0));
  CHECK(s.at("b") == doctest::Approx(1.0));
  CHECK(s.at("c") == doctest::Approx(0.0));
}

TEST_CASE("optimal solutions satisfy every constraint within tolerance") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), rhs(0.5, 4.0);
  for (int trial = 0; trial < 60; ++trial) {
    FeasibilityProgram p;
    int n = 3 + static_cast<int>(rng() % 5);
    std::vector<int> xs;
    for (int i = 0; i < n; ++i) xs.push_back(p.add_variable("x" + std::to_string(i), 0, 3));
    int m = 2 + static_cast<int>(rng() % 5);
    std::vector<Constraint> saved;
    for (int i = 0; i < m; ++i) {
      Row row;
      for (int v : xs) row.emplace_back(v, coef(rng));
      Relation rel = static_cast<Relation>(rng() % 3);
      double b = rhs(rng);
      saved.push_back({row, rel, b});
      p.add_constraint(row, rel, b);
    }
    Row obj;
    for (int v : xs) obj.emplace_back(v, coef(rng));
    p.set_objective(obj, Sense::Maximize);

    Solution s = solve(p);
    if (s.status != Status::Optimal) continue;
    for (const Constraint& c : saved) {
      double lhs = 0.0;
      for (auto [v, cf] : c.row) lhs += cf * s.at(p.id_of(v));
      switch (c.rel) {
        case Relation::LessEq: CHECK(lhs <= c.rhs + 1e-6); break;
        case Relation::GreaterEq: CHECK(lhs >= c.rhs - 1e-6); break;
        case Relation::Equal: CHECK(lhs == doctest::Approx(c.rhs).epsilon(1e-6)); break;
      }
    }
  }
}

TEST_CASE("LP text export names the sections") {
  FeasibilityProgram p;
  int x = p.add_variable("share", 0, 1);
  int z = p.add_variable("pick", 0, 1, VarKind::Binary);
  p.add_constraint({{x, 2.0}, {z, -1.0}}, Relation::LessEq, 1.0);
  p.set_objective({{x, 1.0}}, Sense::Maximize);
  std::string text = write_lp_format(p);
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("Binary") != std::string::npos);
  CHECK(text.find("share") != std::string::npos);
}

TEST_CASE("backend capabilities") { CHECK(backend_supports_milp()); }
