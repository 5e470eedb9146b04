#pragma once

#include "chainedbell/complex_matrix.hpp"

#include <array>
#include <numbers>

namespace chainedbell {

struct Tolerances {
  double simulation = 1e-12;  // exact Born-rule identities
  double box = 1e-9;          // behaviour-box normalisation / no-signalling
  double lp = 1e-7;           // LP feasibility residuals
};

inline constexpr double kMaxEntangledAlpha = std::numbers::sqrt2 / 2.0;

// |Psi> = alpha|00'> + sqrt(1 - alpha^2)|11'> with real non-negative
// coefficients.
class EntangledPairState {
 public:
  explicit EntangledPairState(double alpha);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  // Basis order |00>, |01>, |10>, |11> with Alice as the left factor.
  std::array<Complex, 4> amplitudes() const;
  ComplexMatrix density_matrix() const;
  ComplexMatrix reduced_alice() const;
  ComplexMatrix reduced_bob() const;

  bool subsystem_pure() const noexcept { return alpha_ == 0.0 || alpha_ == 1.0; }

 private:
  double alpha_;
  double beta_;
};

// Measurement axis n = (sin theta, 0, cos theta) in the x-z plane. The stored
// angle is reduced modulo 2*pi into [0, 2*pi).
class MeasurementAngle {
 public:
  MeasurementAngle() = default;
  explicit MeasurementAngle(double theta);

  double radians() const noexcept { return theta_; }

  friend bool operator==(const MeasurementAngle&, const MeasurementAngle&) = default;

 private:
  double theta_ = 0.0;
};

// sigma_n = cos(theta) sigma_z + sin(theta) sigma_x.
ComplexMatrix pauli_along(MeasurementAngle theta);

// Projector (1 + (-1)^outcome sigma_n) / 2. outcome must be 0 or 1.
ComplexMatrix povm_element(MeasurementAngle theta, int outcome);

// tr(E_x^a (x) E_y^b rho).
double joint_probability(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b,
                         int x, int y);

// The four Born probabilities for fixed settings, ordered (x,y) = 00, 01, 10, 11.
std::array<double, 4> joint_table(const EntangledPairState& state, MeasurementAngle a,
                                  MeasurementAngle b);

// Alice's marginal p(x|a,b) = sum_y p(x,y|a,b).
double marginal(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b, int x);
// Bob's marginal p(y|a,b) = sum_x p(x,y|a,b).
double bob_marginal(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b,
                    int y);

// Decorrelation for a pure subsystem: p(x,y) = p(x) p(y) for all outcomes.
// Throws Error(precondition, "subsystem not pure") unless alpha is 0 or 1.
bool decorrelation_check(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b,
                         double tol = Tolerances{}.simulation);

}  // namespace chainedbell
