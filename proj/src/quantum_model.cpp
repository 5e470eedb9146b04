#include "chainedbell/quantum_model.hpp"

#include "chainedbell/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chainedbell {

namespace {

void require_bit(int v, const char* name) {
  if (v != 0 && v != 1) {
    throw Error(ErrorCode::invalid_argument, std::string(name) + " must be 0 or 1");
  }
}

}  // namespace

EntangledPairState::EntangledPairState(double alpha) : alpha_(alpha), beta_(0.0) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1]");
  }
  beta_ = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
}

std::array<Complex, 4> EntangledPairState::amplitudes() const {
  return {Complex(alpha_), Complex(0.0), Complex(0.0), Complex(beta_)};
}

ComplexMatrix EntangledPairState::density_matrix() const {
  const auto psi = amplitudes();
  ComplexMatrix rho(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      rho(i, j) = psi[i] * std::conj(psi[j]);
    }
  }
  return rho;
}

ComplexMatrix EntangledPairState::reduced_alice() const {
  const ComplexMatrix rho = density_matrix();
  ComplexMatrix out(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      out(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
    }
  }
  return out;
}

ComplexMatrix EntangledPairState::reduced_bob() const {
  const ComplexMatrix rho = density_matrix();
  ComplexMatrix out(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      out(i, j) = rho(i, j) + rho(2 + i, 2 + j);
    }
  }
  return out;
}

MeasurementAngle::MeasurementAngle(double theta) {
  if (!std::isfinite(theta)) {
    throw Error(ErrorCode::invalid_argument, "measurement angle must be finite");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  theta_ = r;
}

ComplexMatrix pauli_along(MeasurementAngle theta) {
  const double c = std::cos(theta.radians());
  const double s = std::sin(theta.radians());
  return ComplexMatrix(2, 2, {c, s, s, -c});
}

ComplexMatrix povm_element(MeasurementAngle theta, int outcome) {
  require_bit(outcome, "outcome");
  const double sign = outcome == 0 ? 1.0 : -1.0;
  return (ComplexMatrix::identity(2) + pauli_along(theta) * sign) * 0.5;
}

double joint_probability(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b,
                         int x, int y) {
  require_bit(x, "x");
  require_bit(y, "y");
  const ComplexMatrix op = kron(povm_element(a, x), povm_element(b, y));
  return (op * state.density_matrix()).trace().real();
}

std::array<double, 4> joint_table(const EntangledPairState& state, MeasurementAngle a,
                                  MeasurementAngle b) {
  const ComplexMatrix rho = state.density_matrix();
  std::array<double, 4> out{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const ComplexMatrix op = kron(povm_element(a, x), povm_element(b, y));
      out[static_cast<std::size_t>(2 * x + y)] = (op * rho).trace().real();
    }
  }
  return out;
}

double marginal(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b, int x) {
  require_bit(x, "x");
  return joint_probability(state, a, b, x, 0) + joint_probability(state, a, b, x, 1);
}

double bob_marginal(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b,
                    int y) {
  require_bit(y, "y");
  return joint_probability(state, a, b, 0, y) + joint_probability(state, a, b, 1, y);
}

bool decorrelation_check(const EntangledPairState& state, MeasurementAngle a, MeasurementAngle b,
                         double tol) {
  if (!state.subsystem_pure()) {
    throw Error(ErrorCode::precondition, "subsystem not pure");
  }
  const auto table = joint_table(state, a, b);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double px = table[static_cast<std::size_t>(2 * x)] +
                        table[static_cast<std::size_t>(2 * x + 1)];
      const double py = table[static_cast<std::size_t>(y)] +
                        table[static_cast<std::size_t>(2 + y)];
      if (std::abs(table[static_cast<std::size_t>(2 * x + y)] - px * py) > tol) return false;
    }
  }
  return true;
}

}  // namespace chainedbell
