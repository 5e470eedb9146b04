#include "chainedbell/behavior_box.hpp"

#include "chainedbell/error.hpp"

#include <cmath>
#include <string>

namespace chainedbell {

BehaviorBox::BehaviorBox(std::size_t n_a, std::size_t n_b)
    : n_a_(n_a), n_b_(n_b), p_(n_a * n_b * 4, 0.0) {
  if (n_a == 0 || n_b == 0) {
    throw Error(ErrorCode::invalid_argument, "behaviour box needs at least one setting per side");
  }
}

BehaviorBox BehaviorBox::from_table(std::size_t n_a, std::size_t n_b, std::vector<double> table,
                                    double tol) {
  BehaviorBox box(n_a, n_b);
  if (table.size() != box.p_.size()) {
    throw Error(ErrorCode::invalid_argument,
                "behaviour box table needs " + std::to_string(box.p_.size()) + " entries, got " +
                    std::to_string(table.size()));
  }
  box.p_ = std::move(table);
  box.validate(tol);
  return box;
}

std::size_t BehaviorBox::index(std::size_t a, std::size_t b, int x, int y) const {
  if (a >= n_a_ || b >= n_b_ || (x != 0 && x != 1) || (y != 0 && y != 1)) {
    throw Error(ErrorCode::invalid_argument, "behaviour box index out of range");
  }
  return ((a * n_b_ + b) * 2 + static_cast<std::size_t>(x)) * 2 + static_cast<std::size_t>(y);
}

double BehaviorBox::alice_marginal(std::size_t a, std::size_t b, int x) const {
  return (*this)(a, b, x, 0) + (*this)(a, b, x, 1);
}

double BehaviorBox::bob_marginal(std::size_t a, std::size_t b, int y) const {
  return (*this)(a, b, 0, y) + (*this)(a, b, 1, y);
}

void BehaviorBox::validate(double tol) const {
  for (std::size_t a = 0; a < n_a_; ++a) {
    for (std::size_t b = 0; b < n_b_; ++b) {
      double sum = 0.0;
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          const double v = (*this)(a, b, x, y);
          if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
            throw Error(ErrorCode::invalid_argument,
                        "probability outside [0,1] at setting pair (" + std::to_string(a) + "," +
                            std::to_string(b) + ")");
          }
          sum += v;
        }
      }
      if (std::abs(sum - 1.0) > tol) {
        throw Error(ErrorCode::invalid_argument,
                    "setting pair (" + std::to_string(a) + "," + std::to_string(b) +
                        ") is not normalised");
      }
    }
  }
}

bool BehaviorBox::is_deterministic() const {
  for (double v : p_) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

}  // namespace chainedbell
