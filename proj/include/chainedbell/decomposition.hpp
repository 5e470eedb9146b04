#pragma once

#include "chainedbell/behavior_box.hpp"
#include "chainedbell/chained_bell.hpp"
#include "chainedbell/quantum_model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chainedbell {

// A finite-alphabet decomposition: weights mu(z) and one box per z for a
// fixed state and scenario. The weights carry no setting index, so the
// no-conspiracy condition p(z|a,b) = p(z) holds by construction.
class DecompositionModel {
 public:
  // Throws Error(invalid_argument) when weights are negative, do not sum to 1
  // within tol, box count differs from weight count, or a box does not match
  // the scenario's N x N shape.
  DecompositionModel(EntangledPairState state, ScenarioSettings scenario,
                     std::vector<double> weights, std::vector<BehaviorBox> boxes,
                     double tol = 1e-9);

  const EntangledPairState& state() const noexcept { return state_; }
  const ScenarioSettings& scenario() const noexcept { return scenario_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<BehaviorBox>& boxes() const noexcept { return boxes_; }
  std::size_t z_count() const noexcept { return weights_.size(); }

  // sum_z mu(z) p(x,y|a,b,z) as a single box.
  BehaviorBox averaged_box() const;

 private:
  EntangledPairState state_;
  ScenarioSettings scenario_;
  std::vector<double> weights_;
  std::vector<BehaviorBox> boxes_;
};

using SettingPair = std::pair<std::size_t, std::size_t>;

struct PredicateResult {
  bool pass = false;
  double max_deviation = 0.0;
};

// Born-rule box for the scenario.
BehaviorBox quantum_box(const EntangledPairState& state, const ScenarioSettings& s);

// p(x|a,b) independent of b and p(y|a,b) independent of a.
PredicateResult check_no_signalling(const BehaviorBox& box, double tol = 1e-9);

// Structurally true: see DecompositionModel. Kept as an explicit predicate so
// reports list it next to the others.
PredicateResult check_no_conspiracy(const DecompositionModel& model);

// Largest deviation of each box's row sums from 1.
PredicateResult check_normalization(const DecompositionModel& model, double tol = 1e-9);

// sum_z mu(z) p(x,y|a,b,z) == Born table on every pair in `pairs` (all pairs
// when empty).
PredicateResult averages_to_quantum(const DecompositionModel& model, double tol = 1e-9,
                                    const std::vector<SettingPair>& pairs = {});

// Alice's marginal at setting a. For a signalling box the b = 0 marginal is
// used; callers that care check no-signalling first.
double alice_asymmetry(const BehaviorBox& box, std::size_t a);  // p(0|a) - p(1|a)

struct AdvantageWitness {
  std::size_t z = 0;
  std::size_t a = 0;
  int x = 0;
};

struct BkpEntry {
  double chained_value;   // I_N of this z's box
  double max_asymmetry;   // max_a |p(0|a,z) - p(1|a,z)|
};

struct AdvantageReport {
  double epsilon_achieved = 0.0;
  AdvantageWitness witness;
  std::vector<BkpEntry> per_z_bkp_bounds;
};

AdvantageReport advantage(const DecompositionModel& model);

struct BkpCheck {
  bool pass = false;
  std::vector<bool> per_z;
  double min_slack = 0.0;  // min over z, a of I_N(z) - |asymmetry(z, a)|
};

// I_N(z) >= |p(x|a,z) - p(1-x|a,z)| for every z and Alice setting. Throws
// Error(precondition, "BKP bound presupposes no-signalling") if any box
// signals.
BkpCheck bkp_bound_check(const DecompositionModel& model, double tol = 1e-9);

struct FactorizationCheck {
  bool factorizes = false;
  bool no_signalling = false;
};

// For a 0/1 box: does p(x,y|a,b) = p(x|a) p(y|b) hold with setting-local
// marginals? Throws Error(precondition) for non-deterministic entries.
FactorizationCheck deterministic_factorization_check(const BehaviorBox& box);

// Identity decomposition: one atom carrying the Born box.
DecompositionModel identity_model(const EntangledPairState& state, const ScenarioSettings& s);

// For alpha in {0, 1}: a mixture of deterministic product boxes reproducing
// the Born table. Throws Error(precondition) otherwise.
DecompositionModel construct_product_state_model(const EntangledPairState& state,
                                                 const ScenarioSettings& s);

enum class PairSet {
  chain,  // only the 2N pairs entering I_N
  all,    // every (a, b)
};

std::vector<SettingPair> setting_pairs(std::size_t n, PairSet set);

struct LpOptions {
  PairSet pairs = PairSet::all;
  double tol = 1e-7;
  std::size_t max_iterations = 60;  // ratio-update iterations per sign pattern
};

// One solved (a*, sign pattern) instance.
struct LpRun {
  std::size_t a_star = 0;
  std::size_t positive_atoms = 0;  // atoms asked for p(0) - p(1) >= t
  double t = 0.0;
  std::size_t lp_solves = 0;
};

struct LpAdvantageResult {
  double t_star = 0.0;
  std::size_t a_star = 0;
  std::vector<int> signs;  // +1 / -1 per atom of the optimal pattern
  double chained_bound = 0.0;  // I_N(QM) of the scenario
  double max_residual = 0.0;
  std::vector<SettingPair> pairs;  // pairs constrained by the LP
  std::optional<DecompositionModel> model;  // optimal decomposition, zero atoms dropped
  std::vector<LpRun> runs;
};

// Largest t such that a decomposition with z_count atoms exists that is
// normalised and no-signalling per atom, averages to the Born table on the
// selected pairs, and has sign_z (p(0|a*,z) - p(1|a*,z)) >= t mu(z) for every
// atom, maximised over a* and sign patterns. Throws Error(invalid_argument)
// for z_count == 0 and Error(solver) on LP failure.
LpAdvantageResult lp_max_advantage(const EntangledPairState& state, const ScenarioSettings& s,
                                   std::size_t z_count, const LpOptions& options = {});

}  // namespace chainedbell
