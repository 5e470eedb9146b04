#include "chainedbell/decomposition.hpp"

#include "chainedbell/error.hpp"
#include "chainedbell/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace chainedbell {

DecompositionModel::DecompositionModel(EntangledPairState state, ScenarioSettings scenario,
                                       std::vector<double> weights,
                                       std::vector<BehaviorBox> boxes, double tol)
    : state_(state),
      scenario_(std::move(scenario)),
      weights_(std::move(weights)),
      boxes_(std::move(boxes)) {
  if (weights_.empty()) {
    throw Error(ErrorCode::invalid_argument, "decomposition needs at least one atom");
  }
  if (weights_.size() != boxes_.size()) {
    throw Error(ErrorCode::invalid_argument, "one behaviour box per weight is required");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::invalid_argument, "weights must be finite and non-negative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > tol) {
    throw Error(ErrorCode::invalid_argument,
                "weights sum to " + std::to_string(total) + ", expected 1");
  }
  for (const BehaviorBox& box : boxes_) {
    if (box.n_a() != scenario_.n() || box.n_b() != scenario_.n()) {
      throw Error(ErrorCode::invalid_argument, "box shape does not match the scenario");
    }
    box.validate(tol);
  }
}

BehaviorBox DecompositionModel::averaged_box() const {
  const std::size_t n = scenario_.n();
  std::vector<double> table(n * n * 4, 0.0);
  for (std::size_t z = 0; z < weights_.size(); ++z) {
    const auto& src = boxes_[z].table();
    for (std::size_t i = 0; i < table.size(); ++i) table[i] += weights_[z] * src[i];
  }
  BehaviorBox out(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          out.set(a, b, x, y, table[((a * n + b) * 2 + static_cast<std::size_t>(x)) * 2 +
                                    static_cast<std::size_t>(y)]);
        }
      }
    }
  }
  return out;
}

BehaviorBox quantum_box(const EntangledPairState& state, const ScenarioSettings& s) {
  BehaviorBox box(s.n(), s.n());
  for (std::size_t a = 0; a < s.n(); ++a) {
    for (std::size_t b = 0; b < s.n(); ++b) {
      const auto p = joint_table(state, s.alice()[a], s.bob()[b]);
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) box.set(a, b, x, y, p[static_cast<std::size_t>(2 * x + y)]);
      }
    }
  }
  return box;
}

PredicateResult check_no_signalling(const BehaviorBox& box, double tol) {
  double worst = 0.0;
  for (std::size_t a = 0; a < box.n_a(); ++a) {
    const double ref = box.alice_marginal(a, 0, 0);
    for (std::size_t b = 1; b < box.n_b(); ++b) {
      worst = std::max(worst, std::abs(box.alice_marginal(a, b, 0) - ref));
    }
  }
  for (std::size_t b = 0; b < box.n_b(); ++b) {
    const double ref = box.bob_marginal(0, b, 0);
    for (std::size_t a = 1; a < box.n_a(); ++a) {
      worst = std::max(worst, std::abs(box.bob_marginal(a, b, 0) - ref));
    }
  }
  return {worst <= tol, worst};
}

PredicateResult check_no_conspiracy(const DecompositionModel&) { return {true, 0.0}; }

PredicateResult check_normalization(const DecompositionModel& model, double tol) {
  double worst = 0.0;
  double weight_sum = 0.0;
  for (std::size_t z = 0; z < model.z_count(); ++z) {
    weight_sum += model.weights()[z];
    const BehaviorBox& box = model.boxes()[z];
    for (std::size_t a = 0; a < box.n_a(); ++a) {
      for (std::size_t b = 0; b < box.n_b(); ++b) {
        double sum = 0.0;
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) {
            const double v = box(a, b, x, y);
            worst = std::max(worst, std::max(-v, v - 1.0));
            sum += v;
          }
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
  }
  worst = std::max(worst, std::abs(weight_sum - 1.0));
  return {worst <= tol, worst};
}

PredicateResult averages_to_quantum(const DecompositionModel& model, double tol,
                                    const std::vector<SettingPair>& pairs) {
  const std::vector<SettingPair> checked =
      pairs.empty() ? setting_pairs(model.scenario().n(), PairSet::all) : pairs;
  const BehaviorBox avg = model.averaged_box();
  double worst = 0.0;
  for (const auto& [a, b] : checked) {
    const auto born =
        joint_table(model.state(), model.scenario().alice()[a], model.scenario().bob()[b]);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        worst = std::max(worst,
                         std::abs(avg(a, b, x, y) - born[static_cast<std::size_t>(2 * x + y)]));
      }
    }
  }
  return {worst <= tol, worst};
}

double alice_asymmetry(const BehaviorBox& box, std::size_t a) {
  return box.alice_marginal(a, 0, 0) - box.alice_marginal(a, 0, 1);
}

namespace {

double max_abs_asymmetry(const BehaviorBox& box) {
  double best = 0.0;
  for (std::size_t a = 0; a < box.n_a(); ++a) best = std::max(best, std::abs(alice_asymmetry(box, a)));
  return best;
}

}  // namespace

AdvantageReport advantage(const DecompositionModel& model) {
  AdvantageReport report;
  for (std::size_t z = 0; z < model.z_count(); ++z) {
    const BehaviorBox& box = model.boxes()[z];
    for (std::size_t a = 0; a < box.n_a(); ++a) {
      const double asym = alice_asymmetry(box, a);
      if (std::abs(asym) > report.epsilon_achieved) {
        report.epsilon_achieved = std::abs(asym);
        report.witness = {z, a, asym >= 0.0 ? 0 : 1};
      }
    }
    report.per_z_bkp_bounds.push_back({chained_value_box(box).value, max_abs_asymmetry(box)});
  }
  return report;
}

BkpCheck bkp_bound_check(const DecompositionModel& model, double tol) {
  for (const BehaviorBox& box : model.boxes()) {
    if (!check_no_signalling(box, tol).pass) {
      throw Error(ErrorCode::precondition, "BKP bound presupposes no-signalling");
    }
  }
  BkpCheck out;
  out.pass = true;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (const BehaviorBox& box : model.boxes()) {
    const double slack = chained_value_box(box).value - max_abs_asymmetry(box);
    const bool ok = slack >= -tol;
    out.per_z.push_back(ok);
    out.pass = out.pass && ok;
    out.min_slack = std::min(out.min_slack, slack);
  }
  return out;
}

FactorizationCheck deterministic_factorization_check(const BehaviorBox& box) {
  if (!box.is_deterministic()) {
    throw Error(ErrorCode::precondition, "factorization check needs a deterministic (0/1) box");
  }
  FactorizationCheck out;
  out.no_signalling = check_no_signalling(box, 0.0).pass;
  // Candidate local response functions read off the first row / column.
  auto outcome_x = [&](std::size_t a, std::size_t b) { return box.alice_marginal(a, b, 0) == 1.0 ? 0 : 1; };
  auto outcome_y = [&](std::size_t a, std::size_t b) { return box.bob_marginal(a, b, 0) == 1.0 ? 0 : 1; };
  out.factorizes = true;
  for (std::size_t a = 0; a < box.n_a() && out.factorizes; ++a) {
    for (std::size_t b = 0; b < box.n_b() && out.factorizes; ++b) {
      const int f = outcome_x(a, 0);
      const int g = outcome_y(0, b);
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          const double expected = (x == f && y == g) ? 1.0 : 0.0;
          if (box(a, b, x, y) != expected) out.factorizes = false;
        }
      }
    }
  }
  return out;
}

DecompositionModel identity_model(const EntangledPairState& state, const ScenarioSettings& s) {
  return DecompositionModel(state, s, {1.0}, {quantum_box(state, s)});
}

namespace {

struct Interval {
  double lo;
  double hi;
};

// Partition [0,1] at the cut points; a response variable lambda in an interval
// gives outcome 0 at setting k iff lambda < cuts[k].
std::vector<Interval> partition(std::vector<double> cuts) {
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) out.push_back({cuts[i], cuts[i + 1]});
  }
  return out;
}

}  // namespace

DecompositionModel construct_product_state_model(const EntangledPairState& state,
                                                 const ScenarioSettings& s) {
  if (!state.subsystem_pure()) {
    throw Error(ErrorCode::precondition, "product-state model needs alpha in {0, 1}");
  }
  const std::size_t n = s.n();
  std::vector<double> alice_zero(n), bob_zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    alice_zero[k] = std::clamp(marginal(state, s.alice()[k], s.bob()[0], 0), 0.0, 1.0);
    bob_zero[k] = std::clamp(bob_marginal(state, s.alice()[0], s.bob()[k], 0), 0.0, 1.0);
  }
  const auto alice_parts = partition(alice_zero);
  const auto bob_parts = partition(bob_zero);

  std::vector<double> weights;
  std::vector<BehaviorBox> boxes;
  for (const Interval& ia : alice_parts) {
    const double la = 0.5 * (ia.lo + ia.hi);
    for (const Interval& ib : bob_parts) {
      const double lb = 0.5 * (ib.lo + ib.hi);
      BehaviorBox box(n, n);
      for (std::size_t a = 0; a < n; ++a) {
        const int x = la < alice_zero[a] ? 0 : 1;
        for (std::size_t b = 0; b < n; ++b) {
          const int y = lb < bob_zero[b] ? 0 : 1;
          box.set(a, b, x, y, 1.0);
        }
      }
      weights.push_back((ia.hi - ia.lo) * (ib.hi - ib.lo));
      boxes.push_back(std::move(box));
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return DecompositionModel(state, s, std::move(weights), std::move(boxes));
}

std::vector<SettingPair> setting_pairs(std::size_t n, PairSet set) {
  std::vector<SettingPair> out;
  if (set == PairSet::all) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) out.emplace_back(a, b);
    }
    return out;
  }
  for (const ChainLink& link : chain_links(n)) out.emplace_back(link.a_index, link.b_index);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Atoms that share a sign constraint are interchangeable: any feasible point
// can merge them into one atom and any merged atom can be split evenly back.
// The LP therefore carries one variable block per sign group; `copies`
// records how many of the caller's atoms the group stands for.
struct SignGroup {
  int sign;
  std::size_t copies;
};

class AdvantageProgram {
 public:
  AdvantageProgram(const EntangledPairState& state, const ScenarioSettings& s,
                   std::vector<SettingPair> pairs)
      : n_(s.n()), pairs_(std::move(pairs)) {
    const BehaviorBox born = quantum_box(state, s);
    alice_zero_.resize(n_);
    bob_zero_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      alice_zero_[k] = born.alice_marginal(k, 0, 0);
      bob_zero_[k] = born.bob_marginal(0, k, 0);
    }
    for (const auto& [a, b] : pairs_) both_zero_.push_back(born(a, b, 0, 0));
  }

  std::size_t block() const { return 1 + 2 * n_ + pairs_.size(); }
  std::size_t mu(std::size_t g) const { return g * block(); }
  std::size_t alice(std::size_t g, std::size_t a) const { return g * block() + 1 + a; }
  std::size_t bob(std::size_t g, std::size_t b) const { return g * block() + 1 + n_ + b; }
  std::size_t joint(std::size_t g, std::size_t p) const { return g * block() + 1 + 2 * n_ + p; }

  // maximize w subject to sign_g (2 A_g[a*] - mu_g) - t mu_g >= w for every
  // group; w is shifted by 2 to keep it non-negative.
  LinearProgram build(const std::vector<SignGroup>& groups, std::size_t a_star, double t) const {
    const std::size_t groups_n = groups.size();
    const std::size_t w = groups_n * block();
    LinearProgram lp(w + 1);
    lp.set_objective(w, 1.0);

    for (std::size_t g = 0; g < groups_n; ++g) {
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        const auto [a, b] = pairs_[p];
        lp.add_le({{joint(g, p), 1.0}, {alice(g, a), -1.0}}, 0.0);
        lp.add_le({{joint(g, p), 1.0}, {bob(g, b), -1.0}}, 0.0);
        lp.add_le({{alice(g, a), 1.0}, {bob(g, b), 1.0}, {joint(g, p), -1.0}, {mu(g), -1.0}}, 0.0);
      }
      const double sign = groups[g].sign;
      lp.add_ge({{alice(g, a_star), 2.0 * sign}, {mu(g), -(sign + t)}, {w, -1.0}}, -2.0);
    }

    std::vector<LinearProgram::Term> terms;
    auto sum_over_groups = [&](auto var, double rhs) {
      terms.clear();
      for (std::size_t g = 0; g < groups_n; ++g) terms.emplace_back(var(g), 1.0);
      lp.add_eq(terms, rhs);
    };
    sum_over_groups([&](std::size_t g) { return mu(g); }, 1.0);
    for (std::size_t k = 0; k < n_; ++k) {
      sum_over_groups([&](std::size_t g) { return alice(g, k); }, alice_zero_[k]);
      sum_over_groups([&](std::size_t g) { return bob(g, k); }, bob_zero_[k]);
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      sum_over_groups([&](std::size_t g) { return joint(g, p); }, both_zero_[p]);
    }
    return lp;
  }

  double signed_asymmetry(const std::vector<double>& x, std::size_t g, int sign,
                          std::size_t a_star) const {
    return sign * (2.0 * x[alice(g, a_star)] - x[mu(g)]);
  }

  const std::vector<SettingPair>& pairs() const { return pairs_; }
  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  std::vector<SettingPair> pairs_;
  std::vector<double> alice_zero_;
  std::vector<double> bob_zero_;
  std::vector<double> both_zero_;
};

constexpr double kAtomFloor = 1e-7;

struct PatternSolution {
  double t = -1.0;
  std::vector<double> x;
  double residual = 0.0;
  std::size_t solves = 0;
};

// Ratio iteration for the bilinear constraint: at fixed t the problem is an
// LP in w; each solution yields a feasible t' = min_g asym_g / mu_g >= t, and
// the iteration stops once w can no longer be made positive.
PatternSolution solve_pattern(const AdvantageProgram& program,
                              const std::vector<SignGroup>& groups, std::size_t a_star,
                              const LpOptions& options) {
  PatternSolution best;
  double t = -1.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const LinearProgram lp = program.build(groups, a_star, t);
    const LpResult res = lp.maximize();
    ++best.solves;
    if (res.status != LpStatus::optimal) {
      throw Error(ErrorCode::solver, "advantage LP did not reach an optimum (status " +
                                         std::to_string(static_cast<int>(res.status)) + ")");
    }
    if (res.max_residual > options.tol) {
      throw Error(ErrorCode::solver,
                  "advantage LP residual " + std::to_string(res.max_residual) + " exceeds tolerance");
    }
    double ratio = 1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double m = res.x[program.mu(g)];
      if (m <= kAtomFloor) continue;
      ratio = std::min(ratio, program.signed_asymmetry(res.x, g, groups[g].sign, a_star) / m);
    }
    if (it == 0 || ratio > best.t) {
      best.t = ratio;
      best.x = res.x;
      best.residual = res.max_residual;
    }
    const double w = res.objective - 2.0;
    if (w <= 1e-11 || ratio <= t + 1e-13) break;
    t = ratio;
  }
  return best;
}

std::vector<SignGroup> groups_for(std::size_t z_count, std::size_t positives) {
  std::vector<SignGroup> groups;
  if (positives > 0) groups.push_back({+1, positives});
  if (positives < z_count) groups.push_back({-1, z_count - positives});
  return groups;
}

BehaviorBox extract_box(const AdvantageProgram& program, const std::vector<double>& x,
                        std::size_t g) {
  const std::size_t n = program.n();
  const double m = x[program.mu(g)];
  BehaviorBox box(n, n);
  std::vector<bool> constrained(n * n, false);
  auto fill = [&](std::size_t a, std::size_t b, double p00) {
    const double pa = std::clamp(x[program.alice(g, a)] / m, 0.0, 1.0);
    const double pb = std::clamp(x[program.bob(g, b)] / m, 0.0, 1.0);
    p00 = std::clamp(p00, std::max(0.0, pa + pb - 1.0), std::min(pa, pb));
    box.set(a, b, 0, 0, p00);
    box.set(a, b, 0, 1, pa - p00);
    box.set(a, b, 1, 0, pb - p00);
    box.set(a, b, 1, 1, 1.0 - pa - pb + p00);
  };
  for (std::size_t p = 0; p < program.pairs().size(); ++p) {
    const auto [a, b] = program.pairs()[p];
    fill(a, b, x[program.joint(g, p)] / m);
    constrained[a * n + b] = true;
  }
  // Pairs outside the LP get the product of the atom's marginals.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (constrained[a * n + b]) continue;
      fill(a, b, (x[program.alice(g, a)] / m) * (x[program.bob(g, b)] / m));
    }
  }
  return box;
}

}  // namespace

LpAdvantageResult lp_max_advantage(const EntangledPairState& state, const ScenarioSettings& s,
                                   std::size_t z_count, const LpOptions& options) {
  if (z_count == 0) throw Error(ErrorCode::invalid_argument, "z_count must be at least 1");

  const AdvantageProgram program(state, s, setting_pairs(s.n(), options.pairs));
  LpAdvantageResult result;
  result.chained_bound = chained_value_trace(state, s).value;
  result.pairs = program.pairs();
  result.t_star = -2.0;

  // Distinct merged programs per a*: all-positive, all-negative, mixed.
  const std::size_t mixed_positives = (z_count + 1) / 2;
  std::vector<double> best_x;
  std::vector<SignGroup> best_groups;
  for (std::size_t a_star = 0; a_star < s.n(); ++a_star) {
    PatternSolution all_neg = solve_pattern(program, groups_for(z_count, 0), a_star, options);
    PatternSolution all_pos = solve_pattern(program, groups_for(z_count, z_count), a_star, options);
    std::optional<PatternSolution> mixed;
    if (z_count >= 2) {
      mixed = solve_pattern(program, groups_for(z_count, mixed_positives), a_star, options);
    }
    for (std::size_t k = 0; k <= z_count; ++k) {
      const PatternSolution& sol = k == 0 ? all_neg : (k == z_count ? all_pos : *mixed);
      result.runs.push_back({a_star, k, sol.t, sol.solves});
    }
    auto consider = [&](const PatternSolution& sol, std::size_t positives) {
      if (sol.t > result.t_star + 1e-12) {
        result.t_star = sol.t;
        result.a_star = a_star;
        result.max_residual = sol.residual;
        best_x = sol.x;
        best_groups = groups_for(z_count, positives);
      }
    };
    consider(all_pos, z_count);
    consider(all_neg, 0);
    if (mixed) consider(*mixed, mixed_positives);
  }
  result.t_star = std::max(result.t_star, 0.0);

  std::vector<double> weights;
  std::vector<BehaviorBox> boxes;
  for (std::size_t g = 0; g < best_groups.size(); ++g) {
    const double m = best_x[program.mu(g)];
    if (m <= 1e-12) continue;
    const BehaviorBox box = extract_box(program, best_x, g);
    for (std::size_t c = 0; c < best_groups[g].copies; ++c) {
      weights.push_back(m / static_cast<double>(best_groups[g].copies));
      boxes.push_back(box);
      result.signs.push_back(best_groups[g].sign);
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  result.model.emplace(state, s, std::move(weights), std::move(boxes), options.tol);
  return result;
}

}  // namespace chainedbell
