#pragma once

#include <cstddef>
#include <vector>

namespace chainedbell {

// Joint conditional distribution p(x,y|a,b) over binary outcomes for n_a
// Alice settings and n_b Bob settings. Storage order is (a, b, x, y).
class BehaviorBox {
 public:
  // Zero-filled box; populate with set() and call validate() afterwards, or
  // use from_table() which validates immediately.
  BehaviorBox(std::size_t n_a, std::size_t n_b);

  // Throws Error(invalid_argument) if the table has the wrong length, holds
  // entries outside [0,1] or a setting pair is not normalised within tol.
  static BehaviorBox from_table(std::size_t n_a, std::size_t n_b, std::vector<double> table,
                                double tol = 1e-9);

  std::size_t n_a() const noexcept { return n_a_; }
  std::size_t n_b() const noexcept { return n_b_; }

  double operator()(std::size_t a, std::size_t b, int x, int y) const {
    return p_[index(a, b, x, y)];
  }
  void set(std::size_t a, std::size_t b, int x, int y, double value) {
    p_[index(a, b, x, y)] = value;
  }

  // Alice's marginal p(x|a,b) and Bob's p(y|a,b).
  double alice_marginal(std::size_t a, std::size_t b, int x) const;
  double bob_marginal(std::size_t a, std::size_t b, int y) const;

  void validate(double tol = 1e-9) const;

  // All entries in {0,1} (exactly).
  bool is_deterministic() const;

  const std::vector<double>& table() const noexcept { return p_; }

 private:
  std::size_t index(std::size_t a, std::size_t b, int x, int y) const;

  std::size_t n_a_;
  std::size_t n_b_;
  std::vector<double> p_;
};

}  // namespace chainedbell
