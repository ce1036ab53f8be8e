#pragma once

// Flat JSON configuration documents. See docs/config.md for the schema.
//
// A document describes either an operating point (snr1_db + interference
// mode, normalized units) or a physical system (explicit powers, gains and
// noise levels). Mixing the two forms is a validation error.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "ehrelay/errors.hpp"
#include "ehrelay/model.hpp"

namespace ehrelay::io {

struct ConfigDocument {
  // Shared.
  std::optional<std::size_t> relays;
  std::optional<double> theta;
  std::optional<double> eta;
  std::optional<double> gamma_th_db;
  std::optional<double> gamma_th;  // linear alternative to gamma_th_db
  // Operating-point form.
  std::optional<double> snr1_db;
  std::optional<InterferenceMode> mode;
  std::optional<double> inr_db;
  std::optional<double> sir_db;
  // Physical form.
  std::optional<double> source_power;
  std::optional<double> interferer_power;
  std::optional<double> omega_h;
  std::optional<double> omega_g;
  std::optional<double> omega_beta;
  std::optional<double> sigma2_r;
  std::optional<double> sigma2_d;
  // Monte Carlo.
  std::optional<bool> monte_carlo;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;

  [[nodiscard]] bool physical() const {
    return source_power || interferer_power || omega_h || omega_g || omega_beta || sigma2_r || sigma2_d;
  }

  /// Fields set in `over` replace ours.
  void merge_from(const ConfigDocument& over) {
    auto take = [](auto& dst, const auto& src) {
      if (src) dst = src;
    };
    take(relays, over.relays);
    take(theta, over.theta);
    take(eta, over.eta);
    if (over.gamma_th_db) {
      gamma_th_db = over.gamma_th_db;
      gamma_th.reset();
    }
    if (over.gamma_th) {
      gamma_th = over.gamma_th;
      gamma_th_db.reset();
    }
    take(snr1_db, over.snr1_db);
    if (over.mode) {
      mode = over.mode;
      // A new mode invalidates the level that belongs to the other mode.
      if (*over.mode != InterferenceMode::fixed_inr && !over.inr_db) inr_db.reset();
      if (*over.mode != InterferenceMode::fixed_sir && !over.sir_db) sir_db.reset();
    }
    take(inr_db, over.inr_db);
    take(sir_db, over.sir_db);
    take(source_power, over.source_power);
    take(interferer_power, over.interferer_power);
    take(omega_h, over.omega_h);
    take(omega_g, over.omega_g);
    take(omega_beta, over.omega_beta);
    take(sigma2_r, over.sigma2_r);
    take(sigma2_d, over.sigma2_d);
    take(monte_carlo, over.monte_carlo);
    take(trials, over.trials);
    take(seed, over.seed);
  }
};

inline constexpr double kDefaultThresholdDb = 5.0;
inline constexpr double kDefaultEfficiency = 1.0;
inline constexpr double kDefaultTheta = 0.6;
inline constexpr double kDefaultSnr1Db = 20.0;

namespace detail {

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace detail

/// Parses a flat JSON object. `source` names the document in messages.
inline ConfigDocument parse_config_text(std::string_view text, const std::string& source = "config") {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be a JSON object");

  ConfigDocument out;
  auto number = [&](const std::string& key, const json& v) -> double {
    if (!v.is_number()) throw ParseError(source + ": key '" + key + "' must be a number");
    return v.get<double>();
  };
  auto count = [&](const std::string& key, const json& v) -> std::uint64_t {
    if (!v.is_number_unsigned()) throw ParseError(source + ": key '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  };

  for (const auto& [key, v] : doc.items()) {
    if (key == "relays") {
      const auto n = count(key, v);
      if (n < 1) throw ValidationError(source + ": relays must be >= 1");
      out.relays = static_cast<std::size_t>(n);
    } else if (key == "theta") {
      out.theta = number(key, v);
    } else if (key == "eta") {
      out.eta = number(key, v);
    } else if (key == "gamma_th_db") {
      out.gamma_th_db = number(key, v);
    } else if (key == "gamma_th") {
      out.gamma_th = number(key, v);
    } else if (key == "snr1_db") {
      out.snr1_db = number(key, v);
    } else if (key == "mode") {
      if (!v.is_string()) throw ParseError(source + ": key 'mode' must be a string");
      const auto mode = parse_mode(v.get<std::string>());
      if (!mode) throw ValidationError(source + ": unknown mode '" + v.get<std::string>() + "'");
      out.mode = mode;
    } else if (key == "inr_db") {
      out.inr_db = number(key, v);
    } else if (key == "sir_db") {
      out.sir_db = number(key, v);
    } else if (key == "source_power") {
      out.source_power = number(key, v);
    } else if (key == "interferer_power") {
      out.interferer_power = number(key, v);
    } else if (key == "omega_h") {
      out.omega_h = number(key, v);
    } else if (key == "omega_g") {
      out.omega_g = number(key, v);
    } else if (key == "omega_beta") {
      out.omega_beta = number(key, v);
    } else if (key == "sigma2_r") {
      out.sigma2_r = number(key, v);
    } else if (key == "sigma2_d") {
      out.sigma2_d = number(key, v);
    } else if (key == "monte_carlo") {
      if (!v.is_boolean()) throw ParseError(source + ": key 'monte_carlo' must be true or false");
      out.monte_carlo = v.get<bool>();
    } else if (key == "trials") {
      out.trials = count(key, v);
      if (*out.trials < 1) throw ValidationError(source + ": trials must be >= 1");
    } else if (key == "seed") {
      out.seed = count(key, v);
    } else {
      throw ParseError(source + ": unknown key '" + key + "'");
    }
  }
  if (out.gamma_th && out.gamma_th_db) throw ValidationError(source + ": give gamma_th or gamma_th_db, not both");
  return out;
}

inline ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

using ResolvedConfig = std::variant<OperatingPoint, SystemConfig>;

/// Applies defaults and validates; the result is one of the two forms.
inline ResolvedConfig resolve(const ConfigDocument& doc) {
  const std::size_t relays = doc.relays.value_or(1);
  const double theta = doc.theta.value_or(kDefaultTheta);
  const double eta = doc.eta.value_or(kDefaultEfficiency);

  if (doc.physical()) {
    if (doc.snr1_db || doc.mode || doc.inr_db || doc.sir_db) {
      throw ValidationError("config mixes physical keys with operating-point keys (snr1_db, mode, inr_db, sir_db)");
    }
    SystemConfig config;
    config.relays = relays;
    config.source_power = doc.source_power.value_or(1.0);
    config.interferer_power = doc.interferer_power.value_or(0.0);
    config.mean_gain_sr = doc.omega_h.value_or(1.0);
    config.mean_gain_rd = doc.omega_g.value_or(1.0);
    config.mean_gain_interferer = doc.omega_beta.value_or(1.0);
    config.noise_relay = doc.sigma2_r.value_or(1.0);
    config.noise_destination = doc.sigma2_d.value_or(1.0);
    config.efficiency = eta;
    config.power_split = theta;
    config.threshold = doc.gamma_th ? *doc.gamma_th : from_db(doc.gamma_th_db.value_or(kDefaultThresholdDb));
    config.validate();
    return config;
  }

  OperatingPoint op;
  op.relays = relays;
  op.snr1_db = doc.snr1_db.value_or(kDefaultSnr1Db);
  op.power_split = theta;
  op.efficiency = eta;
  op.threshold_db = doc.gamma_th ? to_db(*doc.gamma_th) : doc.gamma_th_db.value_or(kDefaultThresholdDb);
  op.inr_db = doc.inr_db;
  op.sir_db = doc.sir_db;
  if (doc.mode) {
    op.mode = *doc.mode;
  } else if (doc.inr_db && !doc.sir_db) {
    op.mode = InterferenceMode::fixed_inr;
  } else if (doc.sir_db && !doc.inr_db) {
    op.mode = InterferenceMode::fixed_sir;
  } else {
    op.mode = InterferenceMode::none;
  }
  if (doc.gamma_th && !(*doc.gamma_th > 0.0)) throw ValidationError("gamma_th must be > 0");
  config_from_operating_point(op);  // validates
  return op;
}

inline SystemConfig to_system_config(const ResolvedConfig& resolved) {
  if (const auto* op = std::get_if<OperatingPoint>(&resolved)) return config_from_operating_point(*op);
  return std::get<SystemConfig>(resolved);
}

}  // namespace ehrelay::io
