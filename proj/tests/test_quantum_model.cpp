#include "chainedbell/error.hpp"
#include "chainedbell/quantum_model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace chainedbell;

namespace {

constexpr double kTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool close_to(const ComplexMatrix& m, std::initializer_list<Complex> expected, double tol) {
  std::size_t i = 0;
  for (const Complex& e : expected) {
    if (std::abs(m(i / m.cols(), i % m.cols()) - e) > tol) return false;
    ++i;
  }
  return true;
}

}  // namespace

TEST_CASE("state construction") {
  const EntangledPairState s(0.6);
  CHECK(s.beta() == doctest::Approx(0.8).epsilon(1e-15));
  const ComplexMatrix rho = s.density_matrix();
  CHECK(rho.rows() == 4);
  CHECK(rho.is_hermitian(kTol));
  CHECK(std::abs(rho.trace() - Complex(1.0)) < kTol);
  CHECK(rho.max_abs_diff(rho * rho) < kTol);
  for (double ev : rho.hermitian_eigenvalues()) CHECK(ev >= -kTol);

  CHECK_THROWS_AS(EntangledPairState(-0.1), Error);
  CHECK_THROWS_AS(EntangledPairState(1.0001), Error);
  CHECK_THROWS_AS(EntangledPairState(std::nan("")), Error);
}

TEST_CASE("density matrix invariants over a grid of alpha") {
  for (int i = 0; i <= 50; ++i) {
    const EntangledPairState s(i / 50.0);
    const ComplexMatrix rho = s.density_matrix();
    CHECK(rho.is_hermitian(kTol));
    CHECK(std::abs(rho.trace() - Complex(1.0)) < kTol);
    for (double ev : rho.hermitian_eigenvalues()) CHECK(ev >= -kTol);
  }
}

TEST_CASE("measurement angle is stored modulo 2 pi") {
  CHECK(MeasurementAngle(2.0 * oracle::pi + 0.25).radians() == doctest::Approx(0.25));
  CHECK(MeasurementAngle(-0.5).radians() == doctest::Approx(2.0 * oracle::pi - 0.5));
  const double r = MeasurementAngle(1e6).radians();
  CHECK(r >= 0.0);
  CHECK(r < 2.0 * oracle::pi);
  CHECK_THROWS_AS(MeasurementAngle{std::numeric_limits<double>::infinity()}, Error);
}

TEST_CASE("povm element examples") {
  CHECK(close_to(povm_element(MeasurementAngle(0.0), 0), {1.0, 0.0, 0.0, 0.0}, kTol));
  CHECK(close_to(povm_element(MeasurementAngle(0.0), 0) + povm_element(MeasurementAngle(0.0), 1),
                 {1.0, 0.0, 0.0, 1.0}, kTol));

  // 1/2 (1 + sigma_x), written out entry by entry.
  const ComplexMatrix sigma_x(2, 2, {0.0, 1.0, 1.0, 0.0});
  const ComplexMatrix by_hand = (ComplexMatrix::identity(2) + sigma_x) * Complex(0.5);
  CHECK(close_to(by_hand, {0.5, 0.5, 0.5, 0.5}, 0.0));
  CHECK(povm_element(MeasurementAngle(oracle::pi / 2.0), 0).max_abs_diff(by_hand) < kTol);

  CHECK_THROWS_AS(povm_element(MeasurementAngle(0.0), 2), Error);
}

TEST_CASE("povm elements are complete rank-one projectors on a 100 point grid") {
  const ComplexMatrix id = ComplexMatrix::identity(2);
  for (int i = 0; i < 100; ++i) {
    const MeasurementAngle t(2.0 * oracle::pi * i / 100.0);
    const ComplexMatrix e0 = povm_element(t, 0);
    const ComplexMatrix e1 = povm_element(t, 1);
    CHECK((e0 + e1).max_abs_diff(id) < kTol);
    for (const ComplexMatrix* e : {&e0, &e1}) {
      CHECK(e->is_hermitian(kTol));
      CHECK((*e * *e).max_abs_diff(*e) < kTol);
      CHECK(std::abs(e->trace() - Complex(1.0)) < kTol);
    }
  }
}

TEST_CASE("joint probability examples") {
  const EntangledPairState me(kMaxEntangledAlpha);
  for (double th : {0.0, 0.4, 1.7, 3.0, 5.9}) {
    CHECK(joint_probability(me, MeasurementAngle(th), MeasurementAngle(th), 0, 1) ==
          doctest::Approx(0.0).epsilon(kTol));
  }
  CHECK(std::abs(joint_probability(me, MeasurementAngle(0.0), MeasurementAngle(oracle::pi), 0, 0)) <
        kTol);
  const double quarter = oracle::born(kInvSqrt2, 0.0, oracle::pi / 2.0, 0, 0);
  CHECK(std::abs(quarter - 0.25) < kTol);
  CHECK(std::abs(joint_probability(me, MeasurementAngle(0.0), MeasurementAngle(oracle::pi / 2.0), 0, 0) -
                 quarter) < kTol);
  CHECK_THROWS_AS(joint_probability(me, MeasurementAngle(0.0), MeasurementAngle(0.0), 0, 3), Error);
}

TEST_CASE("joint probability matches the index-sum oracle, is normalised and no-signalling") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = unit(rng);
    const double a = ang(rng);
    const double b = ang(rng);
    const double b2 = ang(rng);
    const EntangledPairState s(alpha);
    const auto table = joint_table(s, MeasurementAngle(a), MeasurementAngle(b));
    double sum = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double p = table[static_cast<std::size_t>(2 * x + y)];
        CHECK(p >= -kTol);
        CHECK(p <= 1.0 + kTol);
        CHECK(std::abs(p - oracle::born(alpha, a, b, x, y)) < kTol);
        sum += p;
      }
    }
    CHECK(std::abs(sum - 1.0) < kTol);
    for (int x = 0; x < 2; ++x) {
      CHECK(std::abs(marginal(s, MeasurementAngle(a), MeasurementAngle(b), x) -
                     marginal(s, MeasurementAngle(a), MeasurementAngle(b2), x)) < kTol);
      CHECK(std::abs(bob_marginal(s, MeasurementAngle(b), MeasurementAngle(a), x) -
                     bob_marginal(s, MeasurementAngle(b2), MeasurementAngle(a), x)) < kTol);
    }
  }
}

TEST_CASE("closed-form joint probabilities") {
  // p(unequal) = sin^2((a-b)/2) - (alpha beta - 1/2) sin a sin b
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * oracle::pi);
  for (int i = 0; i < 200; ++i) {
    const double alpha = unit(rng);
    const double beta = std::sqrt(1.0 - alpha * alpha);
    const double a = ang(rng);
    const double b = ang(rng);
    const EntangledPairState s(alpha);
    const double unequal = joint_probability(s, MeasurementAngle(a), MeasurementAngle(b), 0, 1) +
                           joint_probability(s, MeasurementAngle(a), MeasurementAngle(b), 1, 0);
    const double expected =
        oracle::sin2((a - b) / 2.0) - (alpha * beta - 0.5) * std::sin(a) * std::sin(b);
    CHECK(std::abs(unequal - expected) < kTol);
  }
}

TEST_CASE("marginal examples") {
  const EntangledPairState me(kMaxEntangledAlpha);
  CHECK(std::abs(marginal(me, MeasurementAngle(0.3), MeasurementAngle(1.1), 0) - 0.5) < kTol);
  for (double b : {0.0, 0.7, 2.2}) {
    CHECK(std::abs(marginal(EntangledPairState(1.0), MeasurementAngle(0.0), MeasurementAngle(b), 0) -
                   1.0) < kTol);
    CHECK(std::abs(marginal(EntangledPairState(0.8), MeasurementAngle(0.0), MeasurementAngle(b), 0) -
                   0.64) < kTol);
  }
  for (int i = 0; i < 40; ++i) {
    const MeasurementAngle a(0.157 * i);
    const MeasurementAngle b(0.311 * i + 0.2);
    CHECK(std::abs(marginal(me, a, b, 0) - 0.5) < kTol);
    CHECK(std::abs(marginal(me, a, b, 1) - 0.5) < kTol);
  }
}

TEST_CASE("equal-angle perfect correlation at maximal entanglement") {
  const EntangledPairState me(kMaxEntangledAlpha);
  for (int i = 0; i < 100; ++i) {
    const MeasurementAngle t(2.0 * oracle::pi * i / 100.0);
    CHECK(joint_probability(me, t, t, 0, 1) + joint_probability(me, t, t, 1, 0) < kTol);
  }
}

TEST_CASE("decorrelation check") {
  CHECK(decorrelation_check(EntangledPairState(1.0), MeasurementAngle(0.2), MeasurementAngle(0.9)));
  CHECK(decorrelation_check(EntangledPairState(0.0), MeasurementAngle(1.0), MeasurementAngle(2.0)));
  try {
    decorrelation_check(EntangledPairState(kMaxEntangledAlpha), MeasurementAngle(0.0),
                        MeasurementAngle(0.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "subsystem not pure");
    CHECK(e.code() == ErrorCode::precondition);
  }
}

TEST_CASE("observable quantities do not depend on a global phase") {
  // Multiplying psi by e^{i phi} leaves |psi><psi| and hence every probability unchanged.
  const EntangledPairState s(0.37);
  const ComplexMatrix rho = s.density_matrix();
  const auto amp = s.amplitudes();
  const Complex phase = std::polar(1.0, 1.234);
  ComplexMatrix rotated(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) rotated(i, j) = phase * amp[i] * std::conj(phase * amp[j]);
  }
  CHECK(rotated.max_abs_diff(rho) < kTol);
  const ComplexMatrix e = kron(povm_element(MeasurementAngle(0.4), 0), povm_element(MeasurementAngle(1.3), 1));
  CHECK(std::abs((e * rotated).trace().real() -
                 joint_probability(s, MeasurementAngle(0.4), MeasurementAngle(1.3), 0, 1)) < kTol);
}

TEST_CASE("reduced states") {
  const EntangledPairState s(0.8);
  CHECK(close_to(s.reduced_alice(), {0.64, 0.0, 0.0, 0.36}, kTol));
  CHECK(close_to(s.reduced_bob(), {0.64, 0.0, 0.0, 0.36}, kTol));
  CHECK_FALSE(s.subsystem_pure());
  CHECK(EntangledPairState(1.0).subsystem_pure());
}

TEST_CASE("complex matrix") {
  const ComplexMatrix a(2, 3, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  CHECK(a(1, 0) == Complex(4.0));
  CHECK(a.adjoint().rows() == 3);
  CHECK_THROWS_AS(a.trace(), Error);
  CHECK_THROWS_AS(a.hermitian_eigenvalues(), Error);
  const ComplexMatrix k = kron(ComplexMatrix(2, 2, {1.0, 2.0, 3.0, 4.0}), ComplexMatrix::identity(2));
  CHECK(close_to(k, {1, 0, 2, 0, 0, 1, 0, 2, 3, 0, 4, 0, 0, 3, 0, 4}, 0.0));
}
