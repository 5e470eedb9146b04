#pragma once

#include "chainedbell/chained_bell.hpp"
#include "chainedbell/quantum_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace chainedbell {

struct TrialRecord {
  std::uint64_t round = 0;
  std::uint32_t a_index = 0;
  std::uint32_t b_index = 0;
  std::uint8_t x = 0;
  std::uint8_t y = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

enum class Schedule {
  chain_only,  // setting pair drawn uniformly from the 2N chain links
  uniform,     // setting pair drawn uniformly from all N^2 pairs
};

// Rounds are generated in fixed-size blocks; block k runs an mt19937_64
// seeded with splitmix64(seed, k), so blocks are independent streams and the
// output is a pure function of (state, scenario, rounds, seed, schedule).
inline constexpr std::uint64_t kRoundsPerBlock = 1u << 16;
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64-block65536";

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t stream);

std::vector<TrialRecord> sample_rounds(const EntangledPairState& state, const ScenarioSettings& s,
                                       std::uint64_t rounds, std::uint64_t seed,
                                       Schedule schedule = Schedule::chain_only);

// Per-link sample counts and event counts (event = the link's chain term
// fired: outcomes unequal, or equal on the closing link). Events are real so
// that exact expected frequencies can be injected.
struct ChainTally {
  std::vector<std::uint64_t> samples;
  std::vector<double> events;
};

ChainTally tally_chain(const std::vector<TrialRecord>& records, std::size_t n);

enum class IntervalMode {
  hoeffding,        // union bound over the 2N terms
  clopper_pearson,  // exact binomial per term, Bonferroni over 2N terms
};

struct EmpiricalCertificate {
  std::uint64_t n_rounds = 0;
  double i_n_hat = 0.0;
  double confidence = 0.0;
  double half_width = 0.0;
  double certified_epsilon = 0.0;  // upper confidence bound on I_N
  double lower_bound = 0.0;        // lower confidence bound on I_N
  IntervalMode mode = IntervalMode::hoeffding;
};

inline constexpr std::uint64_t kMinSamplesPerLink = 100;

// Throws Error(precondition, "undersampled chain pair ...") when a link has
// fewer than 100 samples, Error(invalid_argument) for confidence outside (0,1).
EmpiricalCertificate certify_tally(const ChainTally& tally, double confidence,
                                   IntervalMode mode = IntervalMode::hoeffding);

EmpiricalCertificate estimate_chained(const std::vector<TrialRecord>& records,
                                      const ScenarioSettings& s, double confidence,
                                      IntervalMode mode = IntervalMode::hoeffding);

// Trial log: header "round,a_index,b_index,x,y", one record per line.
void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& records);
// Throws ParseError on malformed input.
std::vector<TrialRecord> read_trial_log(std::istream& in);

}  // namespace chainedbell
