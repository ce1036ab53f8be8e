#pragma once

/// \file model.hpp
///
/// Physical parameters of a power-splitting, energy-harvesting
/// decode-and-forward relay network and the analysis-level rates derived
/// from them. All relays are statistically identical.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "ehrelay/errors.hpp"

namespace ehrelay {

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }
inline double to_db(double linear) { return 10.0 * std::log10(linear); }

struct SystemConfig {
  std::size_t relays = 1;
  double source_power = 1.0;          // transmit power of the source
  double interferer_power = 0.0;      // aggregate co-channel interferer power seen by each relay
  double mean_gain_sr = 1.0;          // E|h|^2, source -> relay
  double mean_gain_rd = 1.0;          // E|g|^2, relay -> destination
  double mean_gain_interferer = 1.0;  // E|beta|^2, interferer -> relay
  double noise_relay = 1.0;
  double noise_destination = 1.0;
  double efficiency = 1.0;   // energy conversion efficiency in [0, 1]
  double power_split = 0.5;  // fraction of received power diverted to harvesting, in [0, 1]
  double threshold = 1.0;    // linear SNR threshold

  [[nodiscard]] bool interference_free() const { return interferer_power * mean_gain_interferer == 0.0; }

  /// Zero harvested power (split 0) or zero decoding power (split 1).
  [[nodiscard]] bool forced_outage() const { return power_split == 0.0 || power_split == 1.0; }

  void validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("invalid system config: " + what); };
    auto finite = [](double v) { return std::isfinite(v); };
    if (relays < 1) fail("relays must be >= 1");
    if (!(source_power > 0.0) || !finite(source_power)) fail("source_power must be > 0");
    if (!(interferer_power >= 0.0) || !finite(interferer_power)) fail("interferer_power must be >= 0");
    if (!(mean_gain_sr > 0.0) || !finite(mean_gain_sr)) fail("mean_gain_sr must be > 0");
    if (!(mean_gain_rd > 0.0) || !finite(mean_gain_rd)) fail("mean_gain_rd must be > 0");
    if (!(mean_gain_interferer >= 0.0) || !finite(mean_gain_interferer)) fail("mean_gain_interferer must be >= 0");
    if (!(noise_relay > 0.0) || !finite(noise_relay)) fail("noise_relay must be > 0");
    if (!(noise_destination > 0.0) || !finite(noise_destination)) fail("noise_destination must be > 0");
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) fail("efficiency must lie in [0, 1]");
    if (!(power_split >= 0.0 && power_split <= 1.0)) fail("power_split (theta) must lie in [0, 1]");
    if (!(threshold > 0.0) || !finite(threshold)) fail("threshold must be > 0");
  }
};

/// Mean per-link quantities that the closed-form outage depends on.
struct DerivedRates {
  double first_hop_snr = 0.0;     // mean of the post-split first-hop SNR
  double first_hop_inr = 0.0;     // mean of the post-split interference-to-noise ratio
  double second_hop_scale = 0.0;  // mean of the harvested-power scaling of the second hop
  bool interference_free = false;
  bool zero_harvest = false;  // split 0: relays never transmit

  /// 1/inr - 1/snr; +inf when interference free.
  [[nodiscard]] double rate_gap() const {
    if (interference_free) return std::numeric_limits<double>::infinity();
    return 1.0 / first_hop_inr - 1.0 / first_hop_snr;
  }

  /// 1/snr + rate_gap/(1 + threshold); always positive.
  [[nodiscard]] double combined_decay(double threshold) const {
    if (interference_free) return std::numeric_limits<double>::infinity();
    return (threshold / first_hop_snr + 1.0 / first_hop_inr) / (1.0 + threshold);
  }
};

inline DerivedRates derive_rates(const SystemConfig& config) {
  config.validate();
  const double split = config.power_split;
  if (split == 1.0) {
    throw DegenerateTheta("power split of 1 leaves no power for decoding; second-hop rate undefined");
  }
  DerivedRates rates;
  rates.first_hop_snr = (1.0 - split) * config.source_power * config.mean_gain_sr / config.noise_relay;
  rates.first_hop_inr =
      (1.0 - split) * config.interferer_power * config.mean_gain_interferer / config.noise_relay;
  rates.second_hop_scale = config.efficiency * split / (1.0 - split) * config.noise_relay /
                           config.noise_destination * config.mean_gain_rd;
  rates.interference_free = config.interference_free();
  rates.zero_harvest = split == 0.0 || rates.second_hop_scale == 0.0;
  return rates;
}

enum class InterferenceMode { none, fixed_inr, fixed_sir };

inline std::string_view to_string(InterferenceMode mode) {
  switch (mode) {
    case InterferenceMode::none: return "no_interference";
    case InterferenceMode::fixed_inr: return "fixed_inr";
    case InterferenceMode::fixed_sir: return "fixed_sir";
  }
  return "?";
}

/// Accepts "no_interference", "fixed_inr", "fixed_sir" with '-' or '_'.
inline std::optional<InterferenceMode> parse_mode(std::string_view text) {
  std::string norm(text);
  for (char& c : norm) {
    if (c == '-') c = '_';
  }
  if (norm == "no_interference" || norm == "none") return InterferenceMode::none;
  if (norm == "fixed_inr") return InterferenceMode::fixed_inr;
  if (norm == "fixed_sir") return InterferenceMode::fixed_sir;
  return std::nullopt;
}

/// Figure-style description of a network: first-hop SNR before splitting
/// plus either an INR or an SIR. Levels are in dB.
struct OperatingPoint {
  std::size_t relays = 1;
  double snr1_db = 20.0;
  InterferenceMode mode = InterferenceMode::none;
  std::optional<double> inr_db;
  std::optional<double> sir_db;
  double power_split = 0.6;
  double efficiency = 1.0;
  double threshold_db = 5.0;
};

/// Normalized config (unit noise, unit mean gains) realizing the operating point.
inline SystemConfig config_from_operating_point(const OperatingPoint& op) {
  SystemConfig config;
  config.relays = op.relays;
  config.source_power = from_db(op.snr1_db);
  config.mean_gain_sr = 1.0;
  config.mean_gain_rd = 1.0;
  config.mean_gain_interferer = 1.0;
  config.noise_relay = 1.0;
  config.noise_destination = 1.0;
  config.efficiency = op.efficiency;
  config.power_split = op.power_split;
  config.threshold = from_db(op.threshold_db);

  switch (op.mode) {
    case InterferenceMode::none:
      if (op.inr_db || op.sir_db) throw InvalidMode("no_interference mode takes neither an INR nor an SIR");
      config.interferer_power = 0.0;
      break;
    case InterferenceMode::fixed_inr:
      if (!op.inr_db) throw InvalidMode("fixed_inr mode requires an INR level");
      if (op.sir_db) throw InvalidMode("fixed_inr mode cannot also fix the SIR");
      config.interferer_power = from_db(*op.inr_db);
      break;
    case InterferenceMode::fixed_sir:
      if (!op.sir_db) throw InvalidMode("fixed_sir mode requires an SIR level");
      if (op.inr_db) throw InvalidMode("fixed_sir mode cannot also fix the INR");
      config.interferer_power = config.source_power / from_db(*op.sir_db);
      break;
  }
  config.validate();
  return config;
}

}  // namespace ehrelay
