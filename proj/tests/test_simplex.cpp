#include "chainedbell/simplex.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using chainedbell::LinearProgram;
using chainedbell::LpStatus;

TEST_CASE("textbook maximisation") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  LinearProgram lp(2);
  lp.set_objective(0, 3.0);
  lp.set_objective(1, 5.0);
  lp.add_le({{0, 1.0}}, 4.0);
  lp.add_le({{1, 2.0}}, 12.0);
  lp.add_le({{0, 3.0}, {1, 2.0}}, 18.0);
  const auto r = lp.maximize();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(36.0));
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(r.x[1] == doctest::Approx(6.0));
  CHECK(r.max_residual < 1e-12);
}

TEST_CASE("equalities and lower bounds need phase one") {
  // max x + y s.t. x + y = 3, x >= 1, y >= 1.5, x - y <= 0.
  LinearProgram lp(2);
  lp.set_objective(0, 1.0);
  lp.set_objective(1, 1.0);
  lp.add_eq({{0, 1.0}, {1, 1.0}}, 3.0);
  lp.add_ge({{0, 1.0}}, 1.0);
  lp.add_ge({{1, 1.0}}, 1.5);
  lp.add_le({{0, 1.0}, {1, -1.0}}, 0.0);
  const auto r = lp.maximize();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(3.0));
  CHECK(r.x[1] >= 1.5 - 1e-12);
  CHECK(r.x[0] <= r.x[1] + 1e-12);
}

TEST_CASE("infeasible and unbounded programs are reported") {
  LinearProgram infeasible(1);
  infeasible.add_le({{0, 1.0}}, 1.0);
  infeasible.add_ge({{0, 1.0}}, 2.0);
  CHECK(infeasible.maximize().status == LpStatus::infeasible);

  LinearProgram unbounded(2);
  unbounded.set_objective(0, 1.0);
  unbounded.add_le({{0, -1.0}, {1, 1.0}}, 1.0);
  CHECK(unbounded.maximize().status == LpStatus::unbounded);
}

TEST_CASE("pivot limit") {
  LinearProgram lp(3);
  for (std::size_t j = 0; j < 3; ++j) lp.set_objective(j, 1.0 + j);
  lp.add_le({{0, 1.0}, {1, 1.0}, {2, 1.0}}, 1.0);
  lp.add_ge({{0, 1.0}}, 0.1);
  CHECK(lp.maximize(1e-9, 1).status == LpStatus::iteration_limit);
  CHECK(lp.maximize().status == LpStatus::optimal);
}

TEST_CASE("random feasible programs: optimum dominates random feasible points") {
  // Box-constrained programs max c.x s.t. A x <= b with b built from a known
  // feasible point, then checked against sampled feasible points.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4;
    const std::size_t m = 6;
    LinearProgram lp(n);
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) lp.set_objective(j, c[j] = u(rng));
    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<LinearProgram::Term> row;
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] = u(rng);
        row.push_back({j, a[i][j]});
        lhs += a[i][j] * 0.5;
      }
      b[i] = lhs + 0.5 + std::abs(u(rng));
      lp.add_le(row, b[i]);
    }
    for (std::size_t j = 0; j < n; ++j) lp.add_le({{j, 1.0}}, 2.0);
    const auto r = lp.maximize();
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(lp.residual(r.x) < 1e-9);
    std::uniform_real_distribution<double> pt(0.0, 2.0);
    for (int s = 0; s < 500; ++s) {
      std::vector<double> x(n);
      for (auto& v : x) v = pt(rng);
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += a[i][j] * x[j];
        ok = lhs <= b[i];
      }
      if (!ok) continue;
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += c[j] * x[j];
      CHECK(obj <= r.objective + 1e-9);
    }
  }
}
