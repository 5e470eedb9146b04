#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace chainedbell {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  double max_residual = 0.0;  // largest constraint / bound violation of x
  std::size_t pivots = 0;
};

// maximize c'x  subject to  rows (<=, >=, =)  and  x >= 0.
//
// Solved by a two-phase dense simplex on the dictionary form (one auxiliary
// column for phase 1, equalities split into two inequalities). Pivot updates
// only touch the nonzero columns of the pivot row, which keeps the sparse
// constraint systems built by the decomposition module cheap.
class LinearProgram {
 public:
  using Term = std::pair<std::size_t, double>;

  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const noexcept { return num_vars_; }
  std::size_t num_rows() const noexcept { return rows_.size(); }

  void set_objective(std::size_t var, double coeff);
  void add_le(std::vector<Term> terms, double rhs);
  void add_ge(std::vector<Term> terms, double rhs);
  void add_eq(std::vector<Term> terms, double rhs);

  // eps is the pivoting / optimality threshold. max_pivots == 0 picks a
  // default proportional to the problem size.
  LpResult maximize(double eps = 1e-9, std::size_t max_pivots = 0) const;

  // Largest violation of the stored constraints by x (including x >= 0).
  double residual(const std::vector<double>& x) const;

 private:
  enum class Sense { le, ge, eq };
  struct Row {
    std::vector<Term> terms;
    Sense sense;
    double rhs;
  };

  void add_row(std::vector<Term> terms, Sense sense, double rhs);

  std::size_t num_vars_;
  std::vector<double> objective_;
  std::vector<Row> rows_;
};

}  // namespace chainedbell
