#include "chainedbell/decomposition.hpp"
#include "chainedbell/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace chainedbell;

namespace {

BehaviorBox to_box(const oracle::NsBox& ns) {
  return BehaviorBox::from_table(ns.n, ns.n, ns.table);
}

// 2x2 box with x = f(a), y = g(b) (or arbitrary deterministic responses per pair).
BehaviorBox deterministic_box(const std::array<int, 4>& xs, const std::array<int, 4>& ys) {
  BehaviorBox box(2, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const std::size_t i = 2 * a + b;
      box.set(a, b, xs[i], ys[i], 1.0);
    }
  }
  return box;
}

BehaviorBox pr_box() {
  BehaviorBox box(2, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          box.set(a, b, x, y, (x ^ y) == static_cast<int>(a * b) ? 0.5 : 0.0);
        }
      }
    }
  }
  return box;
}

ScenarioSettings two_by_two() { return equally_spaced_settings(2); }

}  // namespace

TEST_CASE("behaviour box validation") {
  CHECK_THROWS_AS(BehaviorBox::from_table(2, 2, std::vector<double>(15, 0.25)), Error);
  CHECK_THROWS_AS(BehaviorBox::from_table(1, 1, {0.5, 0.5, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(BehaviorBox::from_table(1, 1, {1.2, -0.2, 0.0, 0.0}), Error);
  CHECK_NOTHROW(BehaviorBox::from_table(1, 1, {0.1, 0.2, 0.3, 0.4}));
  CHECK(BehaviorBox::from_table(1, 1, {0.0, 1.0, 0.0, 0.0}).is_deterministic());
  CHECK_FALSE(BehaviorBox::from_table(1, 1, {0.5, 0.5, 0.0, 0.0}).is_deterministic());
}

TEST_CASE("no-signalling examples") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const EntangledPairState s(unit(rng));
    CHECK(check_no_signalling(quantum_box(s, equally_spaced_settings(2 + i % 5))).pass);
  }
  const PredicateResult pr = check_no_signalling(pr_box());
  CHECK(pr.pass);
  CHECK(pr.max_deviation < 1e-15);
  // Direct marginal computation for the PR box: every marginal is 1/2.
  const BehaviorBox p = pr_box();
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      CHECK(p(a, b, 0, 0) + p(a, b, 0, 1) == 0.5);
      CHECK(p(a, b, 0, 0) + p(a, b, 1, 0) == 0.5);
    }
  }

  // p(x=0|a=0,b=0) = 1, p(x=0|a=0,b=1) = 0.
  const BehaviorBox bad = deterministic_box({0, 1, 0, 0}, {0, 0, 0, 0});
  const PredicateResult r = check_no_signalling(bad);
  CHECK_FALSE(r.pass);
  CHECK(r.max_deviation == 1.0);
}

TEST_CASE("convex mixtures of no-signalling boxes stay no-signalling") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const std::size_t z = 1 + trial % 5;
    std::vector<double> w(z);
    std::vector<BehaviorBox> boxes;
    double total = 0.0;
    for (auto& v : w) total += (v = unit(rng) + 1e-3);
    for (auto& v : w) v /= total;
    for (std::size_t k = 0; k < z; ++k) boxes.push_back(to_box(oracle::random_ns_box(n, rng)));
    std::vector<double> mix(n * n * 4, 0.0);
    for (std::size_t k = 0; k < z; ++k) {
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += w[k] * boxes[k].table()[i];
    }
    CHECK(check_no_signalling(BehaviorBox::from_table(n, n, mix)).pass);
  }
}

TEST_CASE("model construction rejects malformed inputs") {
  const EntangledPairState s(kMaxEntangledAlpha);
  const ScenarioSettings sc = two_by_two();
  const BehaviorBox q = quantum_box(s, sc);
  CHECK_THROWS_AS(DecompositionModel(s, sc, {}, {}), Error);
  CHECK_THROWS_AS(DecompositionModel(s, sc, {0.5, 0.5}, {q}), Error);
  CHECK_THROWS_AS(DecompositionModel(s, sc, {0.6, 0.6}, {q, q}), Error);
  CHECK_THROWS_AS(DecompositionModel(s, sc, {1.5, -0.5}, {q, q}), Error);
  CHECK_THROWS_AS(DecompositionModel(s, sc, {1.0}, {BehaviorBox(3, 3)}), Error);
  const DecompositionModel m(s, sc, {0.5, 0.5}, {q, q});
  CHECK(check_no_conspiracy(m).pass);
  CHECK(check_normalization(m).pass);
}

TEST_CASE("averages to quantum") {
  const EntangledPairState s(0.8);
  const ScenarioSettings sc = equally_spaced_settings(3);
  CHECK(averages_to_quantum(identity_model(s, sc)).pass);

  // Symmetric +/- delta perturbation that keeps each box normalised.
  const BehaviorBox q = quantum_box(s, sc);
  BehaviorBox up = q;
  BehaviorBox down = q;
  const double delta = 0.01;
  up.set(1, 2, 0, 0, q(1, 2, 0, 0) + delta);
  up.set(1, 2, 1, 1, q(1, 2, 1, 1) - delta);
  down.set(1, 2, 0, 0, q(1, 2, 0, 0) - delta);
  down.set(1, 2, 1, 1, q(1, 2, 1, 1) + delta);
  const DecompositionModel pm(s, sc, {0.5, 0.5}, {up, down});
  const PredicateResult r = averages_to_quantum(pm);
  CHECK(r.pass);
  CHECK(r.max_deviation < 1e-15);
  const DecompositionModel skewed(s, sc, {0.7, 0.3}, {up, down});
  const PredicateResult rs = averages_to_quantum(skewed);
  CHECK_FALSE(rs.pass);
  CHECK(std::abs(rs.max_deviation - 0.4 * delta) < 1e-12);

  for (double alpha : {0.0, 1.0}) {
    for (std::size_t n : {2u, 3u, 6u}) {
      const DecompositionModel product = construct_product_state_model(EntangledPairState(alpha),
                                                                       equally_spaced_settings(n));
      CHECK(averages_to_quantum(product).pass);
      CHECK(check_normalization(product).pass);
      for (const BehaviorBox& b : product.boxes()) {
        CHECK(check_no_signalling(b).pass);
        CHECK(b.is_deterministic());
      }
    }
  }
}

TEST_CASE("advantage examples") {
  const ScenarioSettings sc = equally_spaced_settings(4);
  const AdvantageReport id = advantage(identity_model(EntangledPairState(kMaxEntangledAlpha), sc));
  CHECK(id.epsilon_achieved < 1e-12);

  BehaviorBox det(4, 4);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) det.set(a, b, 0, 1, 1.0);
  }
  const DecompositionModel dm(EntangledPairState(kMaxEntangledAlpha), sc, {1.0}, {det});
  const AdvantageReport dr = advantage(dm);
  CHECK(dr.epsilon_achieved == 1.0);
  CHECK(dr.witness.x == 0);

  const AdvantageReport r08 = advantage(identity_model(EntangledPairState(0.8), sc));
  CHECK(std::abs(r08.epsilon_achieved - 0.28) < 1e-12);
  CHECK(r08.witness.a == 0);
  CHECK(r08.witness.z == 0);
  const DecompositionModel m08 = identity_model(EntangledPairState(0.8), sc);
  const BehaviorBox& box = m08.boxes()[0];
  const double witnessed = std::abs(box.alice_marginal(r08.witness.a, 0, r08.witness.x) -
                                    box.alice_marginal(r08.witness.a, 0, 1 - r08.witness.x));
  CHECK(std::abs(witnessed - r08.epsilon_achieved) < 1e-12);

  const DecompositionModel product =
      construct_product_state_model(EntangledPairState(1.0), equally_spaced_settings(2));
  const AdvantageReport pr = advantage(product);
  CHECK(pr.epsilon_achieved == doctest::Approx(1.0));
  CHECK(pr.witness.a == 0);
  const AdvantageReport pr0 =
      advantage(construct_product_state_model(EntangledPairState(0.0), equally_spaced_settings(2)));
  CHECK(pr0.epsilon_achieved == doctest::Approx(1.0));
  CHECK(pr0.witness.x == 1);
  CHECK_THROWS_AS(construct_product_state_model(EntangledPairState(0.5), equally_spaced_settings(2)),
                  Error);
}

TEST_CASE("BKP bound examples") {
  const DecompositionModel id =
      identity_model(EntangledPairState(kMaxEntangledAlpha), equally_spaced_settings(4));
  const BkpCheck c = bkp_bound_check(id);
  CHECK(c.pass);
  CHECK(std::abs(c.min_slack - 8.0 * oracle::sin2(oracle::pi / 16.0)) < 1e-12);

  BehaviorBox local(3, 3);
  const std::array<int, 3> f{0, 1, 1};
  const std::array<int, 3> g{1, 1, 0};
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) local.set(a, b, f[a], g[b], 1.0);
  }
  const DecompositionModel lm(EntangledPairState(kMaxEntangledAlpha), equally_spaced_settings(3),
                              {1.0}, {local});
  const BkpCheck lc = bkp_bound_check(lm);
  CHECK(lc.pass);
  CHECK(chained_value_box(local).value >= 1.0);

  const BehaviorBox signalling = deterministic_box({0, 1, 0, 0}, {0, 0, 0, 0});
  const DecompositionModel sm(EntangledPairState(kMaxEntangledAlpha), two_by_two(), {1.0},
                              {signalling});
  try {
    bkp_bound_check(sm);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "BKP bound presupposes no-signalling");
  }
}

TEST_CASE("BKP property sweep on random no-signalling boxes") {
  std::mt19937_64 rng(424242);
  double min_slack = 1e9;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 3);
    const oracle::NsBox ns = oracle::random_ns_box(n, rng);
    const double in = oracle::chained_box(ns);
    double asym = 0.0;
    for (double pa : ns.pa) asym = std::max(asym, std::abs(2.0 * pa - 1.0));
    CHECK(in >= asym - 1e-9);
    min_slack = std::min(min_slack, in - asym);

    const BehaviorBox box = to_box(ns);
    CHECK(std::abs(chained_value_box(box).value - in) < 1e-12);
    const DecompositionModel m(EntangledPairState(kMaxEntangledAlpha), equally_spaced_settings(n),
                               {1.0}, {box});
    CHECK(bkp_bound_check(m).pass);
  }
  // The sweep reaches the boundary of the bound (deterministic and PR-like corners).
  CHECK(min_slack < 1e-9);
}

TEST_CASE("deterministic factorization: exhaustive 2x2 enumeration") {
  // Every 0/1 box on the 2x2 scenario assigns one outcome pair per setting pair: 4^4 = 256 boxes.
  std::size_t ns_count = 0;
  std::size_t factorized = 0;
  for (int code = 0; code < 256; ++code) {
    std::array<int, 4> xs{}, ys{};
    for (int i = 0; i < 4; ++i) {
      const int pair = (code >> (2 * i)) & 3;
      xs[static_cast<std::size_t>(i)] = pair >> 1;
      ys[static_cast<std::size_t>(i)] = pair & 1;
    }
    const FactorizationCheck c = deterministic_factorization_check(deterministic_box(xs, ys));
    // Hand classification: x may depend only on a, y only on b.
    const bool x_local = xs[0] == xs[1] && xs[2] == xs[3];
    const bool y_local = ys[0] == ys[2] && ys[1] == ys[3];
    CHECK(c.no_signalling == (x_local && y_local));
    CHECK(c.factorizes == (x_local && y_local));
    if (c.no_signalling) ++ns_count;
    if (c.factorizes) ++factorized;
    if (!c.factorizes) CHECK_FALSE(c.no_signalling);
  }
  CHECK(ns_count == 16);
  CHECK(factorized == 16);

  // x = b signals and does not factorize.
  const FactorizationCheck xb = deterministic_factorization_check(deterministic_box({0, 1, 0, 1}, {0, 0, 0, 0}));
  CHECK_FALSE(xb.factorizes);
  CHECK_FALSE(xb.no_signalling);

  // The PR box is no-signalling but not deterministic, so it is outside the check's domain.
  CHECK(check_no_signalling(pr_box()).pass);
  CHECK_THROWS_AS(deterministic_factorization_check(pr_box()), Error);
  // Relabelled PR box x + y = (1 - a) b (mod 2) is aligned with the chain and reaches I_2 = 0.
  BehaviorBox aligned(2, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          aligned.set(a, b, x, y, (x ^ y) == static_cast<int>((1 - a) * b) ? 0.5 : 0.0);
        }
      }
    }
  }
  CHECK(check_no_signalling(aligned).pass);
  CHECK(chained_value_box(aligned).value == 0.0);
  CHECK(chained_value_box(pr_box()).value == 2.0);
}

TEST_CASE("setting pairs") {
  CHECK(setting_pairs(3, PairSet::all).size() == 9);
  const auto chain = setting_pairs(3, PairSet::chain);
  CHECK(chain.size() == 6);
  for (const ChainLink& l : chain_links(3)) {
    CHECK(std::find(chain.begin(), chain.end(), SettingPair{l.a_index, l.b_index}) != chain.end());
  }
}

TEST_CASE("advantage LP examples") {
  const EntangledPairState me(kMaxEntangledAlpha);
  LpOptions opts;

  SUBCASE("single atom at maximal entanglement has no advantage") {
    const LpAdvantageResult r = lp_max_advantage(me, equally_spaced_settings(3), 1, opts);
    CHECK(std::abs(r.t_star) < 1e-7);
    REQUIRE(r.model.has_value());
    CHECK(averages_to_quantum(*r.model, 1e-7).pass);
  }

  SUBCASE("product state reaches deterministic advantage") {
    const LpAdvantageResult r = lp_max_advantage(EntangledPairState(1.0), equally_spaced_settings(2), 2, opts);
    CHECK(std::abs(r.t_star - 1.0) < 1e-7);
    CHECK(r.a_star == 0);
  }

  SUBCASE("maximal entanglement is bounded by the chained value") {
    for (std::size_t n : {2u, 3u, 5u}) {
      for (std::size_t z : {1u, 2u, 3u, 4u}) {
        const ScenarioSettings sc = equally_spaced_settings(n);
        const LpAdvantageResult r = lp_max_advantage(me, sc, z, opts);
        const double bound = chained_value_trace(me, sc).value;
        CHECK(std::abs(r.chained_bound - bound) < 1e-12);
        CHECK(r.t_star <= bound + 1e-7);
        CHECK(r.t_star >= 0.0);
        CHECK(r.max_residual < 1e-7);
        REQUIRE(r.model.has_value());
        const DecompositionModel& m = *r.model;
        CHECK(check_normalization(m, 1e-7).pass);
        CHECK(averages_to_quantum(m, 1e-7).pass);
        double weighted = 0.0;
        for (std::size_t k = 0; k < m.z_count(); ++k) {
          CHECK(check_no_signalling(m.boxes()[k], 1e-7).pass);
          const double asym = alice_asymmetry(m.boxes()[k], r.a_star);
          // Every atom respects its one-sided advantage constraint.
          CHECK(r.signs[k] * asym >= r.t_star - 1e-6);
          weighted += m.weights()[k] * std::abs(asym);
        }
        CHECK(weighted <= bound + 1e-7);
        if (z >= 2) CHECK(std::abs(r.t_star - bound) < 1e-7);
      }
    }
  }

  SUBCASE("chain-only pair set is a relaxation") {
    const ScenarioSettings sc = equally_spaced_settings(4);
    LpOptions chain_opts;
    chain_opts.pairs = PairSet::chain;
    const LpAdvantageResult chain = lp_max_advantage(me, sc, 2, chain_opts);
    const LpAdvantageResult all = lp_max_advantage(me, sc, 2, opts);
    CHECK(chain.t_star >= all.t_star - 1e-9);
    CHECK(chain.t_star <= chain.chained_bound + 1e-7);
    CHECK(chain.pairs.size() == 8);
    CHECK(all.pairs.size() == 16);
  }

  CHECK_THROWS_AS(lp_max_advantage(me, equally_spaced_settings(2), 0, opts), Error);
}

TEST_CASE("partially entangled states respect the bound of their own chain value") {
  const ScenarioSettings sc = equally_spaced_settings(3);
  for (double alpha : {0.5, 0.9}) {
    const EntangledPairState s(alpha);
    const LpAdvantageResult r = lp_max_advantage(s, sc, 2);
    REQUIRE(r.model.has_value());
    CHECK(averages_to_quantum(*r.model, 1e-7).pass);
    CHECK(r.t_star >= std::abs(2.0 * alpha * alpha - 1.0) - 1e-7);
  }
}
