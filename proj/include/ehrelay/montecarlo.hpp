#pragma once

/// \file montecarlo.hpp
///
/// Link-level Monte Carlo simulator. Each trial draws the Rayleigh power
/// gains of every relay, builds the decoding set, powers each decoding relay
/// with the energy it harvested, and forwards through the relay with the best
/// destination SNR.
///
/// Every trial owns a counter-based random stream keyed by (seed, trial
/// index), so results do not depend on how trials are split across workers.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "ehrelay/model.hpp"

namespace ehrelay::montecarlo {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// SplitMix64 sequence started from a hash of (seed, trial index).
class TrialStream {
 public:
  using result_type = std::uint64_t;

  TrialStream(std::uint64_t seed, std::uint64_t trial_index)
      : state_(mix64(seed ^ mix64(trial_index + kGolden))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return mix64(state_ += kGolden); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Exponential variate with the given mean; consumes exactly one draw.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::uint64_t state_;
};

struct ChannelRealization {
  std::vector<double> gain_sr;          // |h_i|^2
  std::vector<double> gain_rd;          // |g_i|^2
  std::vector<double> gain_interferer;  // |beta_i|^2
};

struct TrialOutcome {
  ChannelRealization channel;
  std::vector<std::size_t> decoding_set;  // ascending relay indices
  std::vector<double> relay_snr;          // destination SNR per relay in decoding_set
  std::optional<std::size_t> selected_relay;
  double dest_snr = 0.0;
  bool is_outage = true;
};

/// Draws 3L exponentials in the fixed order h, g, beta.
inline void draw_channel(const SystemConfig& config, TrialStream& stream, ChannelRealization& out) {
  const std::size_t n = config.relays;
  out.gain_sr.resize(n);
  out.gain_rd.resize(n);
  out.gain_interferer.resize(n);
  for (double& v : out.gain_sr) v = stream.exponential(config.mean_gain_sr);
  for (double& v : out.gain_rd) v = stream.exponential(config.mean_gain_rd);
  for (double& v : out.gain_interferer) v = stream.exponential(config.mean_gain_interferer);
}

/// Applies decoding, harvesting and opportunistic selection to a drawn channel.
inline void resolve_trial(const SystemConfig& config, TrialOutcome& out) {
  const double split = config.power_split;
  const auto& ch = out.channel;
  out.decoding_set.clear();
  out.relay_snr.clear();
  out.selected_relay.reset();
  out.dest_snr = 0.0;

  for (std::size_t i = 0; i < config.relays; ++i) {
    const double signal = config.source_power * ch.gain_sr[i];
    const double interference = config.interferer_power * ch.gain_interferer[i];
    const double snr_h = (1.0 - split) * signal / config.noise_relay;
    const double inr = (1.0 - split) * interference / config.noise_relay;
    const double sinr = snr_h / (1.0 + inr);
    if (!(sinr >= config.threshold)) continue;

    // Harvest-use: the relay spends E_H / (T/2) = eta * split * (received power).
    const double relay_power = config.efficiency * split * (signal + interference);
    const double snr_d = relay_power * ch.gain_rd[i] / config.noise_destination;
    out.decoding_set.push_back(i);
    out.relay_snr.push_back(snr_d);
    if (!out.selected_relay || snr_d > out.dest_snr) {
      out.selected_relay = i;
      out.dest_snr = snr_d;
    }
  }
  out.is_outage = !out.selected_relay || out.dest_snr < config.threshold;
}

inline void sample_trial(const SystemConfig& config, TrialStream& stream, TrialOutcome& out) {
  draw_channel(config, stream, out.channel);
  resolve_trial(config, out);
}

inline TrialOutcome sample_trial(const SystemConfig& config, TrialStream& stream) {
  TrialOutcome out;
  sample_trial(config, stream, out);
  return out;
}

/// Integer counts from a batch of trials; merging is exact, so any
/// partition of the trial range produces the same tally.
struct SimulationTally {
  std::uint64_t n_trials = 0;
  std::uint64_t outages = 0;
  std::uint64_t first_relay_decodes = 0;
  std::vector<std::uint64_t> decoding_set_sizes;  // histogram over |S| = 0..L

  void merge(const SimulationTally& other) {
    n_trials += other.n_trials;
    outages += other.outages;
    first_relay_decodes += other.first_relay_decodes;
    if (decoding_set_sizes.size() < other.decoding_set_sizes.size()) {
      decoding_set_sizes.resize(other.decoding_set_sizes.size(), 0);
    }
    for (std::size_t i = 0; i < other.decoding_set_sizes.size(); ++i) {
      decoding_set_sizes[i] += other.decoding_set_sizes[i];
    }
  }
};

struct OutageEstimate {
  double p_hat = 0.0;
  std::uint64_t n_trials = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

inline OutageEstimate to_estimate(const SimulationTally& tally, std::uint64_t seed) {
  OutageEstimate est;
  est.n_trials = tally.n_trials;
  est.seed = seed;
  if (tally.n_trials == 0) return est;
  const double n = static_cast<double>(tally.n_trials);
  est.p_hat = static_cast<double>(tally.outages) / n;
  est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
  return est;
}

/// Worker count from EHRELAY_WORKERS, else the hardware concurrency.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("EHRELAY_WORKERS"); env != nullptr) {
    unsigned value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) return value;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline SimulationTally simulate_range(const SystemConfig& config, std::uint64_t first, std::uint64_t last,
                                      std::uint64_t seed) {
  SimulationTally tally;
  tally.decoding_set_sizes.assign(config.relays + 1, 0);
  TrialOutcome outcome;
  for (std::uint64_t k = first; k < last; ++k) {
    TrialStream stream(seed, k);
    sample_trial(config, stream, outcome);
    ++tally.n_trials;
    tally.outages += outcome.is_outage ? 1 : 0;
    tally.decoding_set_sizes[outcome.decoding_set.size()] += 1;
    if (!outcome.decoding_set.empty() && outcome.decoding_set.front() == 0) ++tally.first_relay_decodes;
  }
  return tally;
}

/// Runs trials 0..n_trials-1 on `workers` threads (0 means default_worker_count()).
inline SimulationTally simulate(const SystemConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                                unsigned workers = 0) {
  config.validate();
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(1, n_trials)));

  std::vector<SimulationTally> parts(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t first = n_trials * w / workers;
      const std::uint64_t last = n_trials * (w + 1) / workers;
      threads.emplace_back([&, w, first, last] { parts[w] = simulate_range(config, first, last, seed); });
    }
  }

  SimulationTally total;
  total.decoding_set_sizes.assign(config.relays + 1, 0);
  for (const auto& part : parts) total.merge(part);
  return total;
}

inline OutageEstimate estimate_outage(const SystemConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                                      unsigned workers = 0) {
  if (n_trials < 1) throw ValidationError("estimate_outage requires at least one trial");
  return to_estimate(simulate(config, n_trials, seed, workers), seed);
}

}  // namespace ehrelay::montecarlo
