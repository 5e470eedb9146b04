#include "chainedbell/simplex.hpp"

#include "chainedbell/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chainedbell {

LinearProgram::LinearProgram(std::size_t num_vars)
    : num_vars_(num_vars), objective_(num_vars, 0.0) {
  if (num_vars == 0) {
    throw Error(ErrorCode::invalid_argument, "linear program needs at least one variable");
  }
}

void LinearProgram::set_objective(std::size_t var, double coeff) {
  if (var >= num_vars_) throw Error(ErrorCode::invalid_argument, "objective index out of range");
  objective_[var] = coeff;
}

void LinearProgram::add_row(std::vector<Term> terms, Sense sense, double rhs) {
  for (const Term& t : terms) {
    if (t.first >= num_vars_) {
      throw Error(ErrorCode::invalid_argument, "constraint references unknown variable");
    }
  }
  rows_.push_back({std::move(terms), sense, rhs});
}

void LinearProgram::add_le(std::vector<Term> terms, double rhs) {
  add_row(std::move(terms), Sense::le, rhs);
}
void LinearProgram::add_ge(std::vector<Term> terms, double rhs) {
  add_row(std::move(terms), Sense::ge, rhs);
}
void LinearProgram::add_eq(std::vector<Term> terms, double rhs) {
  add_row(std::move(terms), Sense::eq, rhs);
}

double LinearProgram::residual(const std::vector<double>& x) const {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const Row& row : rows_) {
    double lhs = 0.0;
    for (const auto& [j, c] : row.terms) lhs += c * x[j];
    switch (row.sense) {
      case Sense::le:
        worst = std::max(worst, lhs - row.rhs);
        break;
      case Sense::ge:
        worst = std::max(worst, row.rhs - lhs);
        break;
      case Sense::eq:
        worst = std::max(worst, std::abs(lhs - row.rhs));
        break;
    }
  }
  return worst;
}

namespace {

// Dictionary for  max c'x, Ax <= b, x >= 0. Rows 0..m-1 are constraints,
// row m the phase-2 objective, row m+1 the phase-1 objective. Column n is the
// phase-1 auxiliary variable, column n+1 the right-hand side. basis[i] and
// nonbasis[j] hold variable ids; ids >= n denote slacks, -1 the auxiliary.
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n, double eps, std::size_t max_pivots)
      : m_(m), n_(n), w_(n + 2), eps_(eps), max_pivots_(max_pivots),
        d_((m + 2) * (n + 2), 0.0), basis_(m), nonbasis_(n + 1) {
    for (std::size_t i = 0; i < m; ++i) {
      basis_[i] = static_cast<long>(n + i);
      at(i, n) = -1.0;
    }
    for (std::size_t j = 0; j < n; ++j) nonbasis_[j] = static_cast<long>(j);
    nonbasis_[n] = -1;
    at(m + 1, n) = 1.0;
  }

  double& at(std::size_t i, std::size_t j) { return d_[i * w_ + j]; }
  double at(std::size_t i, std::size_t j) const { return d_[i * w_ + j]; }

  LpStatus solve(std::vector<double>& x, double& objective) {
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && at(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      const LpStatus phase1 = run(2);
      if (phase1 == LpStatus::iteration_limit) return phase1;
      if (phase1 != LpStatus::optimal || at(m_ + 1, n_ + 1) < -eps_) {
        return LpStatus::infeasible;
      }
      // Drive the auxiliary variable out of the basis if it is still there.
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j) {
          if (less(at(i, j), nonbasis_[j], at(i, s), nonbasis_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    const LpStatus phase2 = run(1);
    x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) {
        x[static_cast<std::size_t>(basis_[i])] = at(i, n_ + 1);
      }
    }
    objective = at(m_, n_ + 1);
    return phase2;
  }

  std::size_t pivots() const noexcept { return pivots_; }

 private:
  static bool less(double a, long ia, double b, long ib) {
    return a < b || (a == b && ia < ib);
  }

  void pivot(std::size_t r, std::size_t s) {
    ++pivots_;
    double* row_r = &d_[r * w_];
    const double inv = 1.0 / row_r[s];
    nonzero_.clear();
    for (std::size_t j = 0; j < w_; ++j) {
      if (j != s && row_r[j] != 0.0) nonzero_.push_back(j);
    }
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* row_i = &d_[i * w_];
      if (std::abs(row_i[s]) <= eps_) continue;
      const double factor = row_i[s] * inv;
      for (std::size_t j : nonzero_) row_i[j] -= row_r[j] * factor;
      row_i[s] = row_r[s] * factor;
    }
    for (std::size_t j : nonzero_) row_r[j] *= inv;
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i != r) at(i, s) *= -inv;
    }
    row_r[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  LpStatus run(int phase) {
    const std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
    for (;;) {
      if (pivots_ >= max_pivots_) return LpStatus::iteration_limit;
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase) continue;
        if (s == n_ + 1 || less(at(obj, j), nonbasis_[j], at(obj, s), nonbasis_[s])) s = j;
      }
      if (s == n_ + 1 || at(obj, s) >= -eps_) return LpStatus::optimal;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (at(i, s) <= eps_) continue;
        if (r == m_) {
          r = i;
          continue;
        }
        const double ratio_i = at(i, n_ + 1) / at(i, s);
        const double ratio_r = at(r, n_ + 1) / at(r, s);
        if (less(ratio_i, basis_[i], ratio_r, basis_[r])) r = i;
      }
      if (r == m_) return LpStatus::unbounded;
      pivot(r, s);
    }
  }

  std::size_t m_, n_, w_;
  double eps_;
  std::size_t max_pivots_;
  std::size_t pivots_ = 0;
  std::vector<double> d_;
  std::vector<long> basis_;
  std::vector<long> nonbasis_;
  std::vector<std::size_t> nonzero_;
};

}  // namespace

LpResult LinearProgram::maximize(double eps, std::size_t max_pivots) const {
  std::size_t m = 0;
  for (const Row& row : rows_) m += row.sense == Sense::eq ? 2 : 1;
  if (max_pivots == 0) max_pivots = 50 * (m + num_vars_) + 1000;

  Tableau tab(m, num_vars_, eps, max_pivots);
  std::size_t i = 0;
  auto emit = [&](const Row& row, double sign) {
    for (const auto& [j, c] : row.terms) tab.at(i, j) += sign * c;
    tab.at(i, num_vars_ + 1) = sign * row.rhs;
    ++i;
  };
  for (const Row& row : rows_) {
    switch (row.sense) {
      case Sense::le:
        emit(row, 1.0);
        break;
      case Sense::ge:
        emit(row, -1.0);
        break;
      case Sense::eq:
        emit(row, 1.0);
        emit(row, -1.0);
        break;
    }
  }
  for (std::size_t j = 0; j < num_vars_; ++j) tab.at(m, j) = -objective_[j];

  LpResult result;
  result.status = tab.solve(result.x, result.objective);
  result.pivots = tab.pivots();
  if (result.status == LpStatus::optimal) {
    result.max_residual = residual(result.x);
    double obj = 0.0;
    for (std::size_t j = 0; j < num_vars_; ++j) obj += objective_[j] * result.x[j];
    result.objective = obj;
  }
  return result;
}

}  // namespace chainedbell
