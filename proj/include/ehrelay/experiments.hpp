#pragma once

/// \file experiments.hpp
///
/// Parameter sweeps over the power split and the first-hop SNR, optimal-split
/// search, two-point diversity slopes and the analytic-vs-simulation
/// cross-check harness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "ehrelay/analytic.hpp"
#include "ehrelay/errors.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/montecarlo.hpp"

namespace ehrelay::experiments {

struct MonteCarloOptions {
  bool enabled = false;
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: default_worker_count()
};

struct SweepRow {
  double x = 0.0;
  double analytic = 0.0;
  std::optional<double> empirical;
  std::optional<double> std_error;
  std::optional<std::string> error;  // set when the analytic evaluation failed for this point
};

struct SweepResult {
  std::string variable_name;
  std::vector<SweepRow> rows;
  SystemConfig config_snapshot;
};

struct DiversityEstimate {
  double snr_lo_db = 0.0;
  double snr_hi_db = 0.0;
  double slope = 0.0;
};

struct ThetaOptimum {
  double theta = 0.0;
  double outage = 1.0;
  bool unimodal = true;  // false: the coarse scan found separated local minima
};

/// Evenly spaced grid from `first` to `last` inclusive.
inline std::vector<double> linear_grid(double first, double last, double step) {
  if (!(step > 0.0) || !(last >= first)) throw OutOfRange("grid needs step > 0 and last >= first");
  const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = first + static_cast<double>(i) * step;
  return grid;
}

inline std::vector<double> default_theta_grid() { return linear_grid(0.02, 0.98, 0.02); }
inline std::vector<double> default_snr_grid() { return linear_grid(0.0, 50.0, 5.0); }

namespace detail {

inline SweepRow evaluate_row(double x, const SystemConfig& config, const MonteCarloOptions& mc) {
  SweepRow row;
  row.x = x;
  try {
    row.analytic = analytic::evaluate(config).outage;
  } catch (const NumericError& e) {
    row.analytic = std::nan("");
    row.error = e.what();
  }
  if (mc.enabled) {
    const auto est = montecarlo::estimate_outage(config, mc.n_trials, mc.seed, mc.workers);
    row.empirical = est.p_hat;
    row.std_error = est.std_error;
  }
  return row;
}

inline void require_ascending(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw OutOfRange(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw OutOfRange(std::string(what) + " grid must be strictly ascending");
  }
}

}  // namespace detail

/// True when `values` descend then ascend (either part may be empty), ignoring
/// steps smaller than `noise`.
inline bool is_unimodal(std::span<const double> values, double noise) {
  int phase = 0;  // 0: descending, 1: ascending
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (std::abs(d) <= noise) continue;
    if (d > 0) {
      phase = 1;
    } else if (phase == 1) {
      return false;
    }
  }
  return true;
}

/// Outage against the power split. Monte Carlo points share `mc.seed`, so
/// neighbouring rows use common random numbers.
inline SweepResult sweep_theta(const SystemConfig& base, std::span<const double> theta_grid,
                               const MonteCarloOptions& mc = {}) {
  detail::require_ascending(theta_grid, "theta");
  for (double t : theta_grid) {
    if (!(t > 0.0 && t < 1.0)) throw OutOfRange("theta grid values must lie strictly inside (0, 1)");
  }
  SweepResult result;
  result.variable_name = "theta";
  result.config_snapshot = base;
  for (double t : theta_grid) {
    SystemConfig config = base;
    config.power_split = t;
    result.rows.push_back(detail::evaluate_row(t, config, mc));
  }
  return result;
}

/// Outage against the first-hop SNR (dB) at a fixed operating point.
inline SweepResult sweep_snr(const OperatingPoint& base, std::span<const double> snr_grid_db,
                             const MonteCarloOptions& mc = {}) {
  detail::require_ascending(snr_grid_db, "snr");
  SweepResult result;
  result.variable_name = "snr1_db";
  for (double snr : snr_grid_db) {
    OperatingPoint op = base;
    op.snr1_db = snr;
    const SystemConfig config = config_from_operating_point(op);
    if (result.rows.empty()) result.config_snapshot = config;
    result.rows.push_back(detail::evaluate_row(snr, config, mc));
  }
  return result;
}

/// Coarse scan (step 0.02 on [0.01, 0.99]) followed by golden-section
/// refinement of the best bracket down to `tol`.
inline ThetaOptimum find_optimal_theta(const SystemConfig& base, double tol = 1e-3) {
  if (!(tol > 0.0 && tol < 0.1)) throw OutOfRange("theta tolerance must lie in (0, 0.1)");
  auto objective = [&base](double theta) {
    SystemConfig config = base;
    config.power_split = theta;
    return analytic::evaluate(config).outage;
  };

  const auto grid = linear_grid(0.01, 0.99, 0.02);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = objective(grid[i]);
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());

  ThetaOptimum out;
  out.unimodal = is_unimodal(values, 1e-9 * std::max(1e-300, values[best]) + 1e-15);

  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double f_mid = objective(mid);
  out.theta = mid;
  out.outage = f_mid;
  if (values[best] < f_mid) {
    out.theta = grid[best];
    out.outage = values[best];
  }
  return out;
}

/// Two-point secant slope -d log10(P_out) / d (SNR_dB / 10).
inline DiversityEstimate estimate_diversity_order(const SweepResult& sweep, double snr_lo_db, double snr_hi_db) {
  auto find = [&sweep](double x) -> const SweepRow& {
    for (const auto& row : sweep.rows) {
      if (std::abs(row.x - x) <= 1e-9 * std::max(1.0, std::abs(x))) return row;
    }
    throw OutOfRange("sweep has no row at " + std::to_string(x) + " dB");
  };
  if (!(snr_hi_db > snr_lo_db)) throw OutOfRange("diversity endpoints must satisfy lo < hi");
  const SweepRow& lo = find(snr_lo_db);
  const SweepRow& hi = find(snr_hi_db);
  if (!(lo.analytic > 0.0) || !(hi.analytic > 0.0)) {
    throw ZeroProbability("outage underflows to zero at a diversity endpoint");
  }
  DiversityEstimate est;
  est.snr_lo_db = snr_lo_db;
  est.snr_hi_db = snr_hi_db;
  est.slope = -(std::log10(hi.analytic) - std::log10(lo.analytic)) / ((snr_hi_db - snr_lo_db) / 10.0);
  return est;
}

struct ValidationReport {
  analytic::OutagePoint analytic;
  montecarlo::OutageEstimate estimate;
  double outage_tolerance = 0.0;
  bool outage_agrees = false;

  double first_hop_analytic = 0.0;
  double first_hop_empirical = 0.0;
  double first_hop_tolerance = 0.0;
  bool first_hop_agrees = false;

  double chi_square = 0.0;
  std::size_t chi_square_dof = 0;
  double chi_square_pvalue = 1.0;
  bool set_size_agrees = false;

  [[nodiscard]] bool passed() const { return outage_agrees && first_hop_agrees && set_size_agrees; }
};

inline constexpr double kAgreementFloor = 1e-3;
inline constexpr double kChiSquareSignificance = 1e-3;

namespace detail {

// Pearson statistic with adjacent bins pooled until each expects >= 5 counts.
inline std::pair<double, std::size_t> pooled_chi_square(std::span<const double> expected,
                                                        std::span<const std::uint64_t> observed) {
  std::vector<std::pair<double, double>> groups;  // (expected, observed)
  double e_acc = 0.0;
  double o_acc = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    e_acc += expected[i];
    o_acc += static_cast<double>(observed[i]);
    if (e_acc >= 5.0) {
      groups.emplace_back(e_acc, o_acc);
      e_acc = 0.0;
      o_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (groups.empty()) {
      groups.emplace_back(e_acc, o_acc);
    } else {
      groups.back().first += e_acc;
      groups.back().second += o_acc;
    }
  }
  double stat = 0.0;
  for (const auto& [e, o] : groups) {
    if (e > 0.0) stat += (o - e) * (o - e) / e;
  }
  return {stat, groups.empty() ? 0 : groups.size() - 1};
}

}  // namespace detail

/// Compares an analytic point with a simulation tally: outage within
/// max(3 stderr, 1e-3), relay-0 decoding fraction within 3 stderr of the
/// first-hop success probability, and a pooled chi-square test of the
/// decoding-set size against Binomial(L, success).
inline ValidationReport assess(const SystemConfig& config, const analytic::OutagePoint& point,
                               const montecarlo::SimulationTally& tally, std::uint64_t seed) {
  ValidationReport report;
  report.analytic = point;
  report.estimate = montecarlo::to_estimate(tally, seed);
  const double n = static_cast<double>(tally.n_trials);

  report.outage_tolerance = std::max(3.0 * report.estimate.std_error, kAgreementFloor);
  report.outage_agrees = std::abs(point.outage - report.estimate.p_hat) <= report.outage_tolerance;

  const double success = analytic::first_hop_success(config);
  report.first_hop_analytic = success;
  report.first_hop_empirical = static_cast<double>(tally.first_relay_decodes) / n;
  report.first_hop_tolerance = 3.0 * std::sqrt(success * (1.0 - success) / n) + 1e-12;
  report.first_hop_agrees =
      std::abs(report.first_hop_empirical - success) <= report.first_hop_tolerance;

  const std::size_t relays = config.relays;
  std::vector<double> expected(relays + 1);
  for (std::size_t l = 0; l <= relays; ++l) {
    const double log_binom = std::lgamma(static_cast<double>(relays) + 1.0) -
                             std::lgamma(static_cast<double>(l) + 1.0) -
                             std::lgamma(static_cast<double>(relays - l) + 1.0);
    const double p_l = std::exp(log_binom) * std::pow(success, static_cast<double>(l)) *
                       std::pow(1.0 - success, static_cast<double>(relays - l));
    expected[l] = n * p_l;
  }
  const auto [stat, dof] = detail::pooled_chi_square(expected, tally.decoding_set_sizes);
  report.chi_square = stat;
  report.chi_square_dof = dof;
  if (dof == 0) {
    // A single pooled bin: every trial must land where all the mass is.
    report.chi_square_pvalue = stat == 0.0 ? 1.0 : 0.0;
  } else {
    report.chi_square_pvalue = boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
  }
  report.set_size_agrees = report.chi_square_pvalue >= kChiSquareSignificance;
  return report;
}

inline ValidationReport validate(const SystemConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                                 unsigned workers = 0) {
  if (n_trials < 100'000) throw OutOfRange("validate requires at least 1e5 trials");
  const auto point = analytic::evaluate(config);
  const auto tally = montecarlo::simulate(config, n_trials, seed, workers);
  return assess(config, point, tally, seed);
}

}  // namespace ehrelay::experiments
