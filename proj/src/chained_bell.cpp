#include "chainedbell/chained_bell.hpp"

#include "chainedbell/error.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>

namespace chainedbell {

ScenarioSettings::ScenarioSettings(std::vector<MeasurementAngle> alice,
                                   std::vector<MeasurementAngle> bob)
    : alice_(std::move(alice)), bob_(std::move(bob)) {
  if (alice_.size() != bob_.size()) {
    throw Error(ErrorCode::invalid_argument, "Alice and Bob need the same number of settings");
  }
  if (alice_.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "a chained scenario needs N >= 2 settings per side");
  }
}

std::vector<ChainLink> chain_links(std::size_t n) {
  std::vector<ChainLink> links;
  links.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    links.push_back({k, k, false});
    if (k + 1 < n) {
      links.push_back({k + 1, k, false});
    } else {
      links.push_back({0, k, true});
    }
  }
  return links;
}

namespace {

void check_indices(const ScenarioSettings& s, std::size_t a, std::size_t b) {
  if (a >= s.n() || b >= s.n()) {
    throw Error(ErrorCode::invalid_argument, "setting index out of range");
  }
}

void check_indices(const BehaviorBox& box, std::size_t a, std::size_t b) {
  if (a >= box.n_a() || b >= box.n_b()) {
    throw Error(ErrorCode::invalid_argument, "setting index out of range");
  }
}

}  // namespace

double term_unequal(const BehaviorBox& box, std::size_t a_index, std::size_t b_index) {
  check_indices(box, a_index, b_index);
  return box(a_index, b_index, 0, 1) + box(a_index, b_index, 1, 0);
}

double term_equal(const BehaviorBox& box, std::size_t a_index, std::size_t b_index) {
  check_indices(box, a_index, b_index);
  return box(a_index, b_index, 0, 0) + box(a_index, b_index, 1, 1);
}

double term_unequal(const EntangledPairState& state, const ScenarioSettings& s,
                    std::size_t a_index, std::size_t b_index) {
  check_indices(s, a_index, b_index);
  const auto p = joint_table(state, s.alice()[a_index], s.bob()[b_index]);
  return p[1] + p[2];
}

double term_equal(const EntangledPairState& state, const ScenarioSettings& s,
                  std::size_t a_index, std::size_t b_index) {
  check_indices(s, a_index, b_index);
  const auto p = joint_table(state, s.alice()[a_index], s.bob()[b_index]);
  return p[0] + p[3];
}

double chain_quantum_bound(std::size_t n) {
  const double s = std::sin(std::numbers::pi / (4.0 * static_cast<double>(n)));
  return 2.0 * static_cast<double>(n) * s * s;
}

double chain_small_angle_bound(std::size_t n) {
  return std::numbers::pi * std::numbers::pi / (8.0 * static_cast<double>(n));
}

ChainedBellReport chained_value_trace(const EntangledPairState& state, const ScenarioSettings& s) {
  ChainedBellReport report;
  report.n = s.n();
  report.quantum_upper_bound = chain_quantum_bound(s.n());
  for (const ChainLink& link : chain_links(s.n())) {
    const double t = link.equal_event ? term_equal(state, s, link.a_index, link.b_index)
                                      : term_unequal(state, s, link.a_index, link.b_index);
    report.terms.push_back(t);
    report.value += t;
  }
  return report;
}

ChainedBellReport chained_value_box(const BehaviorBox& box) {
  if (box.n_a() != box.n_b() || box.n_a() < 2) {
    throw Error(ErrorCode::invalid_argument, "chained value needs a square box with N >= 2");
  }
  ChainedBellReport report;
  report.n = box.n_a();
  report.quantum_upper_bound = chain_quantum_bound(report.n);
  for (const ChainLink& link : chain_links(report.n)) {
    const double t = link.equal_event ? term_equal(box, link.a_index, link.b_index)
                                      : term_unequal(box, link.a_index, link.b_index);
    report.terms.push_back(t);
    report.value += t;
  }
  return report;
}

double chained_value_closed_form(const EntangledPairState& state, const ScenarioSettings& s,
                                 ClosedForm variant) {
  const std::size_t n = s.n();
  const double coeff = state.alpha() * state.beta() - 0.5;
  auto alice = [&](std::size_t k) {
    if (k < n) return s.alice()[k].radians();
    const double wrapped = s.alice()[0].radians();
    return variant == ClosedForm::corrected ? wrapped + std::numbers::pi : wrapped;
  };
  double sin_sq = 0.0;
  double sin_prod = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = alice(k);
    const double th_next = alice(k + 1);
    const double thp = s.bob()[k].radians();
    const double d1 = std::sin(th / 2.0 - thp / 2.0);
    const double d2 = std::sin(thp / 2.0 - th_next / 2.0);
    sin_sq += d1 * d1 + d2 * d2;
    sin_prod += std::sin(th) * std::sin(thp) + std::sin(thp) * std::sin(th_next);
  }
  return sin_sq - coeff * sin_prod;
}

ChainedBellReport chained_value(const EntangledPairState& state, const ScenarioSettings& s,
                                ChainedSource source) {
  ChainedBellReport report = chained_value_trace(state, s);
  switch (source) {
    case ChainedSource::trace:
      break;
    case ChainedSource::closed_form_printed:
      report.value = chained_value_closed_form(state, s, ClosedForm::printed);
      break;
    case ChainedSource::closed_form_corrected:
      report.value = chained_value_closed_form(state, s, ClosedForm::corrected);
      break;
  }
  return report;
}

ClosedFormDiscrepancy compare_closed_forms(std::size_t samples, std::size_t max_n,
                                           std::uint64_t seed, double tol) {
  if (max_n < 2) {
    throw Error(ErrorCode::invalid_argument, "max_n must be at least 2");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<std::size_t> pick_n(2, max_n);

  ClosedFormDiscrepancy out;
  out.samples = samples;
  out.tol = tol;
  for (std::size_t i = 0; i < samples; ++i) {
    const EntangledPairState state(unit(rng));
    const std::size_t n = pick_n(rng);
    std::vector<MeasurementAngle> alice, bob;
    for (std::size_t k = 0; k < n; ++k) alice.emplace_back(angle(rng));
    for (std::size_t k = 0; k < n; ++k) bob.emplace_back(angle(rng));
    const ScenarioSettings s(std::move(alice), std::move(bob));

    const double trace = chained_value_trace(state, s).value;
    const double printed =
        std::abs(chained_value_closed_form(state, s, ClosedForm::printed) - trace);
    const double corrected =
        std::abs(chained_value_closed_form(state, s, ClosedForm::corrected) - trace);
    out.max_printed_error = std::max(out.max_printed_error, printed);
    out.max_corrected_error = std::max(out.max_corrected_error, corrected);
    if (printed > tol) ++out.printed_failures;
    if (corrected > tol) ++out.corrected_failures;
  }
  return out;
}

ScenarioSettings equally_spaced_settings(std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::invalid_argument, "equally spaced settings need n >= 2");
  }
  const double step = std::numbers::pi / static_cast<double>(n);
  std::vector<MeasurementAngle> alice, bob;
  for (std::size_t k = 0; k < n; ++k) {
    alice.emplace_back(step * static_cast<double>(k));
    bob.emplace_back(step * (static_cast<double>(k) + 0.5));
  }
  return {std::move(alice), std::move(bob)};
}

EpsilonScenario settings_for_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must be positive and finite");
  }
  const double raw = std::ceil(std::numbers::pi * std::numbers::pi / (4.0 * epsilon));
  if (raw > 1e7) {
    throw Error(ErrorCode::invalid_argument, "epsilon too small: scenario would exceed 1e7 settings");
  }
  const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(raw));
  return {n, equally_spaced_settings(n)};
}

std::size_t local_deterministic_minimum(std::size_t n) {
  if (n < 2 || n > kMaxDeterministicN) {
    throw Error(ErrorCode::precondition,
                "deterministic enumeration supports 2 <= n <= " +
                    std::to_string(kMaxDeterministicN) + ", got " + std::to_string(n));
  }
  // Bit k of x (resp. y) is Alice's (Bob's) outcome at setting k.
  const std::uint32_t full = (1u << n) - 1u;
  const std::uint32_t inner = (1u << (n - 1)) - 1u;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::uint32_t x = 0; x <= full; ++x) {
    for (std::uint32_t y = 0; y <= full; ++y) {
      const auto straight = static_cast<std::size_t>(std::popcount(x ^ y));
      const auto cross = static_cast<std::size_t>(std::popcount((y ^ (x >> 1)) & inner));
      const std::size_t closing = ((y >> (n - 1)) & 1u) == (x & 1u) ? 1 : 0;
      best = std::min(best, straight + cross + closing);
    }
  }
  return best;
}

namespace {

struct MinimizeContext {
  const EntangledPairState* state;
  std::size_t n;
};

ScenarioSettings settings_from_vector(const gsl_vector* v, std::size_t n) {
  std::vector<MeasurementAngle> alice, bob;
  for (std::size_t k = 0; k < n; ++k) alice.emplace_back(gsl_vector_get(v, k));
  for (std::size_t k = 0; k < n; ++k) bob.emplace_back(gsl_vector_get(v, n + k));
  return {std::move(alice), std::move(bob)};
}

double chained_objective(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const MinimizeContext*>(params);
  return chained_value_trace(*ctx->state, settings_from_vector(v, ctx->n)).value;
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

ChainedMinimum minimize_chained_value(const EntangledPairState& state, std::size_t n,
                                      std::size_t restarts, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "n must be at least 2");
  if (restarts == 0) throw Error(ErrorCode::invalid_argument, "need at least one start");

  MinimizeContext ctx{&state, n};
  gsl_multimin_function fn{&chained_objective, 2 * n, &ctx};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2 * n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(2 * n));
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> minimizer(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2 * n));

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best(2 * n, 0.0);
  for (std::size_t r = 0; r < restarts; ++r) {
    for (std::size_t i = 0; i < 2 * n; ++i) gsl_vector_set(x.get(), i, angle(rng));
    // Restart from the converged simplex a few times; Nelder-Mead stalls on
    // flat directions of the periodic objective otherwise.
    for (int polish = 0; polish < 4; ++polish) {
      gsl_vector_set_all(step.get(), polish == 0 ? 0.5 : 0.05);
      gsl_multimin_fminimizer_set(minimizer.get(), &fn, x.get(), step.get());
      for (int it = 0; it < 20000; ++it) {
        if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer.get()), 1e-11) ==
            GSL_SUCCESS) {
          break;
        }
      }
      gsl_vector_memcpy(x.get(), gsl_multimin_fminimizer_x(minimizer.get()));
    }
    const double value = minimizer->fval;
    if (value < best_value) {
      best_value = value;
      for (std::size_t i = 0; i < 2 * n; ++i) best[i] = gsl_vector_get(x.get(), i);
    }
  }

  std::vector<MeasurementAngle> alice, bob;
  for (std::size_t k = 0; k < n; ++k) alice.emplace_back(best[k]);
  for (std::size_t k = 0; k < n; ++k) bob.emplace_back(best[n + k]);
  ScenarioSettings settings(std::move(alice), std::move(bob));
  return {chained_value_trace(state, settings).value, std::move(settings)};
}

}  // namespace chainedbell
