#include "chainedbell/experiment.hpp"

#include "chainedbell/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace chainedbell {

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<TrialRecord> sample_rounds(const EntangledPairState& state, const ScenarioSettings& s,
                                       std::uint64_t rounds, std::uint64_t seed,
                                       Schedule schedule) {
  if (rounds == 0) throw Error(ErrorCode::invalid_argument, "rounds must be at least 1");

  struct PairSource {
    std::uint32_t a;
    std::uint32_t b;
    std::array<double, 3> cdf;  // cumulative p00, p00+p01, p00+p01+p10
  };
  std::vector<PairSource> sources;
  auto add = [&](std::size_t a, std::size_t b) {
    const auto p = joint_table(state, s.alice()[a], s.bob()[b]);
    sources.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                       {p[0], p[0] + p[1], p[0] + p[1] + p[2]}});
  };
  if (schedule == Schedule::chain_only) {
    for (const ChainLink& link : chain_links(s.n())) add(link.a_index, link.b_index);
  } else {
    for (std::size_t a = 0; a < s.n(); ++a) {
      for (std::size_t b = 0; b < s.n(); ++b) add(a, b);
    }
  }

  std::vector<TrialRecord> out(rounds);
  const std::uint64_t blocks = (rounds + kRoundsPerBlock - 1) / kRoundsPerBlock;
  const std::uint64_t pair_count = sources.size();
  for (std::uint64_t block = 0; block < blocks; ++block) {
    std::mt19937_64 rng(splitmix64(seed, block));
    const std::uint64_t begin = block * kRoundsPerBlock;
    const std::uint64_t end = std::min(rounds, begin + kRoundsPerBlock);
    for (std::uint64_t r = begin; r < end; ++r) {
      const PairSource& src = sources[rng() % pair_count];
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const int cell = u < src.cdf[0] ? 0 : u < src.cdf[1] ? 1 : u < src.cdf[2] ? 2 : 3;
      out[r] = {r, src.a, src.b, static_cast<std::uint8_t>(cell >> 1),
                static_cast<std::uint8_t>(cell & 1)};
    }
  }
  return out;
}

ChainTally tally_chain(const std::vector<TrialRecord>& records, std::size_t n) {
  const auto links = chain_links(n);
  // (a, b) -> link index; every chain pair is distinct.
  std::vector<long> link_of(n * n, -1);
  for (std::size_t k = 0; k < links.size(); ++k) {
    link_of[links[k].a_index * n + links[k].b_index] = static_cast<long>(k);
  }
  ChainTally tally{std::vector<std::uint64_t>(links.size(), 0),
                   std::vector<double>(links.size(), 0.0)};
  for (const TrialRecord& rec : records) {
    if (rec.a_index >= n || rec.b_index >= n) {
      throw Error(ErrorCode::invalid_argument, "trial record setting index out of range");
    }
    const long k = link_of[rec.a_index * n + rec.b_index];
    if (k < 0) continue;
    const auto idx = static_cast<std::size_t>(k);
    ++tally.samples[idx];
    const bool equal = rec.x == rec.y;
    if (equal == links[idx].equal_event) tally.events[idx] += 1.0;
  }
  return tally;
}

EmpiricalCertificate certify_tally(const ChainTally& tally, double confidence, IntervalMode mode) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "confidence must lie in (0, 1)");
  }
  if (tally.samples.empty() || tally.samples.size() != tally.events.size()) {
    throw Error(ErrorCode::invalid_argument, "tally needs one sample/event count per chain term");
  }
  const double terms = static_cast<double>(tally.samples.size());
  EmpiricalCertificate cert;
  cert.confidence = confidence;
  cert.mode = mode;
  for (std::size_t k = 0; k < tally.samples.size(); ++k) {
    if (tally.samples[k] < kMinSamplesPerLink) {
      throw Error(ErrorCode::precondition,
                  "undersampled chain pair: term " + std::to_string(k + 1) + " has " +
                      std::to_string(tally.samples[k]) + " samples, need " +
                      std::to_string(kMinSamplesPerLink));
    }
    cert.n_rounds += tally.samples[k];
    cert.i_n_hat += tally.events[k] / static_cast<double>(tally.samples[k]);
  }

  const double delta = 1.0 - confidence;
  if (mode == IntervalMode::hoeffding) {
    const double log_term = std::log(2.0 * terms / delta);
    for (std::uint64_t m : tally.samples) {
      cert.half_width += std::sqrt(log_term / (2.0 * static_cast<double>(m)));
    }
    cert.certified_epsilon = cert.i_n_hat + cert.half_width;
    cert.lower_bound = cert.i_n_hat - cert.half_width;
    return cert;
  }

  const double per_term = delta / terms;
  double upper = 0.0;
  double lower = 0.0;
  for (std::size_t k = 0; k < tally.samples.size(); ++k) {
    const double m = static_cast<double>(tally.samples[k]);
    const double hits = std::round(tally.events[k]);
    upper += hits >= m ? 1.0
                       : boost::math::ibeta_inv(hits + 1.0, m - hits, 1.0 - per_term / 2.0);
    lower += hits <= 0.0 ? 0.0 : boost::math::ibeta_inv(hits, m - hits + 1.0, per_term / 2.0);
  }
  cert.certified_epsilon = std::max(upper, cert.i_n_hat);
  cert.lower_bound = lower;
  cert.half_width = cert.certified_epsilon - cert.i_n_hat;
  return cert;
}

EmpiricalCertificate estimate_chained(const std::vector<TrialRecord>& records,
                                      const ScenarioSettings& s, double confidence,
                                      IntervalMode mode) {
  return certify_tally(tally_chain(records, s.n()), confidence, mode);
}

void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "round,a_index,b_index,x,y\n";
  for (const TrialRecord& r : records) {
    out << r.round << ',' << r.a_index << ',' << r.b_index << ',' << int{r.x} << ','
        << int{r.y} << '\n';
  }
}

std::vector<TrialRecord> read_trial_log(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "round,a_index,b_index,x,y") {
    throw ParseError(1, 1, "expected header 'round,a_index,b_index,x,y'");
  }
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::uint64_t, 5> fields{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto [next, ec] = std::from_chars(p, end, fields[f]);
      const auto column = static_cast<std::size_t>(p - line.data()) + 1;
      if (ec != std::errc()) throw ParseError(line_no, column, "expected an unsigned integer");
      p = next;
      if (f + 1 < fields.size()) {
        if (p == end || *p != ',') throw ParseError(line_no, column, "expected ','");
        ++p;
      }
    }
    if (p != end) {
      throw ParseError(line_no, static_cast<std::size_t>(p - line.data()) + 1,
                       "trailing characters");
    }
    if (fields[3] > 1 || fields[4] > 1) throw ParseError(line_no, 1, "outcomes must be 0 or 1");
    out.push_back({fields[0], static_cast<std::uint32_t>(fields[1]),
                   static_cast<std::uint32_t>(fields[2]), static_cast<std::uint8_t>(fields[3]),
                   static_cast<std::uint8_t>(fields[4])});
  }
  return out;
}

}  // namespace chainedbell
