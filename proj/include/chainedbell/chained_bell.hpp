#pragma once

#include "chainedbell/behavior_box.hpp"
#include "chainedbell/quantum_model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chainedbell {

// N Alice settings theta_1..theta_N and N Bob settings theta'_1..theta'_N.
class ScenarioSettings {
 public:
  ScenarioSettings(std::vector<MeasurementAngle> alice, std::vector<MeasurementAngle> bob);

  std::size_t n() const noexcept { return alice_.size(); }
  const std::vector<MeasurementAngle>& alice() const noexcept { return alice_; }
  const std::vector<MeasurementAngle>& bob() const noexcept { return bob_; }

 private:
  std::vector<MeasurementAngle> alice_;
  std::vector<MeasurementAngle> bob_;
};

// One link of the chain. `equal_event` marks the closing link whose term is
// p(outcomes equal) because x_{N+1} := x_1 + 1 (mod 2).
struct ChainLink {
  std::size_t a_index;
  std::size_t b_index;
  bool equal_event;
};

// Links in chain order (th_1,th'_1), (th'_1,th_2), (th_2,th'_2), ..., (th'_N,th_1).
std::vector<ChainLink> chain_links(std::size_t n);

struct ChainedBellReport {
  std::size_t n = 0;
  std::vector<double> terms;  // 2N entries, chain order
  double value = 0.0;
  double quantum_upper_bound = 0.0;  // 2N sin^2(pi/4N)
  double local_lower_bound = 1.0;
};

// p(x != y | a, b) and p(x == y | a, b).
double term_unequal(const BehaviorBox& box, std::size_t a_index, std::size_t b_index);
double term_equal(const BehaviorBox& box, std::size_t a_index, std::size_t b_index);
double term_unequal(const EntangledPairState& state, const ScenarioSettings& s,
                    std::size_t a_index, std::size_t b_index);
double term_equal(const EntangledPairState& state, const ScenarioSettings& s,
                  std::size_t a_index, std::size_t b_index);
// The closing term p(x_1 == y_N).
inline double term_equal_last(const EntangledPairState& state, const ScenarioSettings& s) {
  return term_equal(state, s, 0, s.n() - 1);
}

// Direct summation of the 2N Born-rule terms.
ChainedBellReport chained_value_trace(const EntangledPairState& state, const ScenarioSettings& s);
// Same chain evaluated on an arbitrary box with n_a == n_b == N.
ChainedBellReport chained_value_box(const BehaviorBox& box);

// Closed-form variants of the sin^2 / sin-product expression:
//   printed    - index wrap theta_{N+1} := theta_1, taken literally.
//   corrected  - theta_{N+1} := theta_1 + pi, the angle that realises the
//                outcome flip x_{N+1} = x_1 + 1 on the closing link.
enum class ClosedForm { printed, corrected };

double chained_value_closed_form(const EntangledPairState& state, const ScenarioSettings& s,
                                 ClosedForm variant = ClosedForm::corrected);

enum class ChainedSource { trace, closed_form_printed, closed_form_corrected };

// Reported value chosen by `source`; terms always come from the trace path.
ChainedBellReport chained_value(const EntangledPairState& state, const ScenarioSettings& s,
                                ChainedSource source = ChainedSource::trace);

struct ClosedFormDiscrepancy {
  std::size_t samples = 0;
  double max_printed_error = 0.0;
  double max_corrected_error = 0.0;
  std::size_t printed_failures = 0;  // samples beyond tol
  std::size_t corrected_failures = 0;
  double tol = 0.0;
};

// Random (alpha, N in [2, max_n], angles) draws compared against the trace path.
ClosedFormDiscrepancy compare_closed_forms(std::size_t samples, std::size_t max_n,
                                           std::uint64_t seed, double tol = 1e-9);

// theta_k = pi (k-1) / N, theta'_l = pi (l - 1/2) / N. Throws for n < 2.
ScenarioSettings equally_spaced_settings(std::size_t n);

struct EpsilonScenario {
  std::size_t n;
  ScenarioSettings settings;
};

// N = ceil(pi^2 / (4 eps)), clamped to N >= 2. Throws for eps <= 0.
EpsilonScenario settings_for_epsilon(double epsilon);

// 2N sin^2(pi/4N): the maximally entangled value on equally spaced settings.
double chain_quantum_bound(std::size_t n);
// pi^2 / (8N), the small-angle upper bound of the above.
double chain_small_angle_bound(std::size_t n);

inline constexpr std::size_t kMaxDeterministicN = 12;

// Minimum of I_N over deterministic local assignments x = f(a), y = g(b),
// enumerated exhaustively. Throws Error(precondition) for n > 12 or n < 2.
std::size_t local_deterministic_minimum(std::size_t n);

struct ChainedMinimum {
  double value;
  ScenarioSettings settings;
};

// Nelder-Mead over all 2N angles with `restarts` random starts.
ChainedMinimum minimize_chained_value(const EntangledPairState& state, std::size_t n,
                                      std::size_t restarts, std::uint64_t seed);

}  // namespace chainedbell
