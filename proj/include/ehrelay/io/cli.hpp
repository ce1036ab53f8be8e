#pragma once

// Command-line front end. `main_entry` is the whole program; the binary in
// tools/ only forwards argv and the standard streams to it.
//
// Exit codes: 0 success, 1 cross-check failed (validate), 2 usage,
// 3 invalid input, 4 numeric failure, 5 I/O failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ehrelay/analytic.hpp"
#include "ehrelay/errors.hpp"
#include "ehrelay/experiments.hpp"
#include "ehrelay/io/config_file.hpp"
#include "ehrelay/io/csv.hpp"
#include "ehrelay/io/svg.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/montecarlo.hpp"

namespace ehrelay::io {

enum class Command { outage, sweep_theta, sweep_snr, optimal_theta, diversity, validate };

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitNumeric = 4,
  kExitIo = 5,
};

struct RunSpec {
  Command command = Command::outage;
  ConfigDocument config;  // file values with command-line overrides applied
  std::optional<std::string> config_path;
  std::optional<std::string> output;  // stdout when absent
  std::optional<std::string> plot_path;
  bool log_y = false;
  experiments::MonteCarloOptions mc;

  double theta_min = 0.02;
  double theta_max = 0.98;
  double theta_step = 0.02;
  double snr_min_db = 0.0;
  double snr_max_db = 50.0;
  double snr_step_db = 5.0;
  double theta_tol = 1e-3;
  double snr_lo_db = 35.0;
  double snr_hi_db = 45.0;
};

struct HelpRequested {
  std::string text;
};

namespace detail {

struct Flags {
  std::string config_path;
  std::size_t relays = 0;
  double snr1_db = 0, inr_db = 0, sir_db = 0, theta = 0, eta = 0, gamma_th_db = 0;
  std::string mode;
  std::string output, plot;
  bool log_y = false;
  bool mc = false;
  std::uint64_t trials = 0, seed = 0;
  unsigned workers = 0;
};

struct Registered {
  CLI::App* sub = nullptr;
  Command command{};
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  [[nodiscard]] bool given(const std::string& name) const {
    for (const auto& [n, o] : opts) {
      if (n == name) return o->count() > 0;
    }
    return false;
  }
};

inline void add_common(Registered& reg, Flags& f, bool with_mc_toggle, bool with_plot) {
  CLI::App& s = *reg.sub;
  auto add = [&reg](const std::string& key, CLI::Option* o) { reg.opts.emplace_back(key, o); };
  add("config", s.add_option("--config", f.config_path, "JSON config file (flags override its values)")
                    ->check(CLI::ExistingFile));
  add("relays", s.add_option("--relays", f.relays, "number of relays L")
                    ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20)));
  add("snr1", s.add_option("--snr1-db", f.snr1_db, "first-hop average SNR P_S*Omega_h/sigma_R^2 in dB"));
  add("mode", s.add_option("--mode", f.mode, "no-interference | fixed-inr | fixed-sir")
                  ->check(CLI::IsMember({"no-interference", "no_interference", "fixed-inr", "fixed_inr",
                                         "fixed-sir", "fixed_sir"})));
  add("inr", s.add_option("--inr-db", f.inr_db, "first-hop average INR in dB (fixed-inr mode)"));
  add("sir", s.add_option("--sir-db", f.sir_db, "first-hop average SIR in dB (fixed-sir mode)"));
  add("theta", s.add_option("--theta", f.theta, "power-splitting ratio in [0, 1]")->check(CLI::Range(0.0, 1.0)));
  add("eta", s.add_option("--eta", f.eta, "energy conversion efficiency in [0, 1] (default 1)")
                 ->check(CLI::Range(0.0, 1.0)));
  add("gamma", s.add_option("--gamma-th-db", f.gamma_th_db, "SNR threshold in dB (default 5)"));
  add("output", s.add_option("-o,--output", f.output, "CSV output path (default: stdout)"));
  if (with_plot) {
    add("plot", s.add_option("--plot", f.plot, "write an SVG chart to this path"));
    add("logy", s.add_flag("--log-y", f.log_y, "logarithmic y axis in the SVG chart"));
  }
  if (with_mc_toggle) add("mc", s.add_flag("--mc", f.mc, "also run the Monte Carlo simulator"));
  add("trials", s.add_option("--trials", f.trials, "Monte Carlo trials per point")
                    ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40)));
  add("seed", s.add_option("--seed", f.seed, "Monte Carlo seed"));
  add("workers", s.add_option("--workers", f.workers, "Monte Carlo worker threads (default: EHRELAY_WORKERS or all cores)")
                     ->check(CLI::Range(1u, 4096u)));
}

inline ConfigDocument overrides_from(const Registered& reg, const Flags& f) {
  ConfigDocument doc;
  if (reg.given("relays")) doc.relays = f.relays;
  if (reg.given("snr1")) doc.snr1_db = f.snr1_db;
  if (reg.given("mode")) doc.mode = parse_mode(f.mode);
  if (reg.given("inr")) doc.inr_db = f.inr_db;
  if (reg.given("sir")) doc.sir_db = f.sir_db;
  if (reg.given("theta")) doc.theta = f.theta;
  if (reg.given("eta")) doc.eta = f.eta;
  if (reg.given("gamma")) doc.gamma_th_db = f.gamma_th_db;
  if (reg.given("mc") && f.mc) doc.monte_carlo = true;
  if (reg.given("trials")) doc.trials = f.trials;
  if (reg.given("seed")) doc.seed = f.seed;
  return doc;
}

}  // namespace detail

/// Parses argv into a RunSpec, loading and merging --config when given.
/// Throws UsageError on bad flags and HelpRequested for --help.
inline RunSpec parse_args(int argc, const char* const* argv) {
  CLI::App app{"Outage analysis of energy-harvesting decode-and-forward relay networks", "ehrelay"};
  app.require_subcommand(1);
  RunSpec spec;
  detail::Flags flags;
  std::vector<detail::Registered> subs;
  subs.reserve(6);

  auto make = [&](const char* name, const char* desc, Command cmd, bool mc_toggle, bool plot) -> detail::Registered& {
    subs.push_back({app.add_subcommand(name, desc), cmd, {}});
    detail::add_common(subs.back(), flags, mc_toggle, plot);
    return subs.back();
  };

  make("outage", "closed-form outage probability of one configuration", Command::outage, true, false);

  auto& st = make("sweep-theta", "outage versus the power-splitting ratio", Command::sweep_theta, true, true);
  st.sub->add_option("--theta-min", spec.theta_min, "first grid value (default 0.02)");
  st.sub->add_option("--theta-max", spec.theta_max, "last grid value (default 0.98)");
  st.sub->add_option("--theta-step", spec.theta_step, "grid step (default 0.02)")->check(CLI::PositiveNumber);

  auto& ss = make("sweep-snr", "outage versus the first-hop average SNR", Command::sweep_snr, true, true);
  ss.sub->add_option("--snr-min-db", spec.snr_min_db, "first grid value (default 0)");
  ss.sub->add_option("--snr-max-db", spec.snr_max_db, "last grid value (default 50)");
  ss.sub->add_option("--snr-step-db", spec.snr_step_db, "grid step (default 5)")->check(CLI::PositiveNumber);

  auto& ot = make("optimal-theta", "power-splitting ratio minimizing outage", Command::optimal_theta, false, false);
  ot.sub->add_option("--tol", spec.theta_tol, "theta resolution (default 1e-3)")->check(CLI::Range(1e-9, 0.1));

  auto& dv = make("diversity", "two-point diversity slope between two SNRs", Command::diversity, false, false);
  dv.sub->add_option("--snr-lo-db", spec.snr_lo_db, "lower SNR endpoint (default 35)");
  dv.sub->add_option("--snr-hi-db", spec.snr_hi_db, "upper SNR endpoint (default 45)");

  make("validate", "cross-check the closed form against Monte Carlo", Command::validate, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = app.exit(e, out, err);
    if (code == 0) throw HelpRequested{out.str() + err.str()};
    throw UsageError(e.what());
  }

  const detail::Registered* chosen = nullptr;
  for (const auto& reg : subs) {
    if (reg.sub->parsed()) chosen = &reg;
  }
  if (chosen == nullptr) throw UsageError("a command is required");
  spec.command = chosen->command;

  if (chosen->given("config")) {
    spec.config_path = flags.config_path;
    spec.config = load_config(flags.config_path);
  }
  spec.config.merge_from(detail::overrides_from(*chosen, flags));
  if (chosen->given("output")) spec.output = flags.output;
  if (chosen->given("plot")) spec.plot_path = flags.plot;
  spec.log_y = flags.log_y;

  spec.mc.enabled = spec.command == Command::validate || spec.config.monte_carlo.value_or(false);
  spec.mc.n_trials = spec.config.trials.value_or(1'000'000);
  spec.mc.seed = spec.config.seed.value_or(1);
  spec.mc.workers = chosen->given("workers") ? flags.workers : 0;
  return spec;
}

namespace detail {

inline void summarize_point(std::ostream& log, const analytic::OutagePoint& p) {
  log << "outage=" << format_number(p.outage) << " joint_below=" << format_number(p.joint_below)
      << " first_hop_fail=" << format_number(p.first_hop_fail) << " branch=" << analytic::to_string(p.branch)
      << '\n';
}

inline void maybe_plot(const RunSpec& spec, const experiments::SweepResult& result, std::ostream& log) {
  if (!spec.plot_path) return;
  const auto rep = emit_svg(result, *spec.plot_path, spec.log_y);
  if (rep.degenerate_range) log << "warning: all plotted values are equal; axis padded\n";
  if (rep.points_dropped > 0) log << "warning: " << rep.points_dropped << " point(s) not plottable\n";
}

inline OperatingPoint require_operating_point(const ResolvedConfig& resolved, const char* command) {
  if (const auto* op = std::get_if<OperatingPoint>(&resolved)) return *op;
  throw ValidationError(std::string(command) + " needs an operating-point config (snr1_db and mode), not physical keys");
}

inline int execute(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  const ResolvedConfig resolved = resolve(spec.config);

  switch (spec.command) {
    case Command::outage: {
      const SystemConfig config = to_system_config(resolved);
      const auto point = analytic::evaluate(config);
      std::optional<montecarlo::OutageEstimate> est;
      if (spec.mc.enabled) est = montecarlo::estimate_outage(config, spec.mc.n_trials, spec.mc.seed, spec.mc.workers);
      emit_csv(point, config.power_split, out, est);
      summarize_point(log, point);
      return kExitOk;
    }
    case Command::sweep_theta: {
      const SystemConfig base = to_system_config(resolved);
      const auto grid = experiments::linear_grid(spec.theta_min, spec.theta_max, spec.theta_step);
      const auto result = experiments::sweep_theta(base, grid, spec.mc);
      emit_csv(result, out);
      maybe_plot(spec, result, log);
      return kExitOk;
    }
    case Command::sweep_snr: {
      const OperatingPoint op = require_operating_point(resolved, "sweep-snr");
      const auto grid = experiments::linear_grid(spec.snr_min_db, spec.snr_max_db, spec.snr_step_db);
      const auto result = experiments::sweep_snr(op, grid, spec.mc);
      emit_csv(result, out);
      maybe_plot(spec, result, log);
      return kExitOk;
    }
    case Command::optimal_theta: {
      const SystemConfig base = to_system_config(resolved);
      const auto best = experiments::find_optimal_theta(base, spec.theta_tol);
      analytic::OutagePoint point;
      point.outage = best.outage;
      emit_csv(point, best.theta, out);
      log << "theta*=" << format_number(best.theta) << " outage=" << format_number(best.outage) << '\n';
      if (!best.unimodal) log << "warning: outage is not unimodal in theta; reporting the best coarse minimum\n";
      return kExitOk;
    }
    case Command::diversity: {
      const OperatingPoint op = require_operating_point(resolved, "diversity");
      const std::vector<double> grid{spec.snr_lo_db, spec.snr_hi_db};
      const auto result = experiments::sweep_snr(op, grid, spec.mc);
      const auto div = experiments::estimate_diversity_order(result, spec.snr_lo_db, spec.snr_hi_db);
      emit_csv(result, out);
      log << "diversity slope over [" << spec.snr_lo_db << ", " << spec.snr_hi_db
          << "] dB = " << format_number(div.slope) << '\n';
      return kExitOk;
    }
    case Command::validate: {
      const SystemConfig config = to_system_config(resolved);
      const auto report = experiments::validate(config, spec.mc.n_trials, spec.mc.seed, spec.mc.workers);
      emit_csv(report.analytic, config.power_split, out, report.estimate);
      log << (report.outage_agrees ? "PASS" : "FAIL") << " outage: analytic=" << format_number(report.analytic.outage)
          << " montecarlo=" << format_number(report.estimate.p_hat)
          << " tolerance=" << format_number(report.outage_tolerance) << '\n'
          << (report.first_hop_agrees ? "PASS" : "FAIL")
          << " first-hop success: analytic=" << format_number(report.first_hop_analytic)
          << " montecarlo=" << format_number(report.first_hop_empirical) << '\n'
          << (report.set_size_agrees ? "PASS" : "FAIL") << " decoding-set size: chi2=" << report.chi_square
          << " dof=" << report.chi_square_dof << " p=" << report.chi_square_pvalue << '\n';
      return report.passed() ? kExitOk : kExitCheckFailed;
    }
  }
  return kExitUsage;
}

}  // namespace detail

/// Runs a parsed spec, writing CSV to --output (or `out`) and diagnostics to `log`.
inline int run(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  if (spec.output) {
    std::ofstream file(*spec.output, std::ios::binary);
    if (!file) throw IoError("cannot open output '" + *spec.output + "'");
    return detail::execute(spec, file, log);
  }
  return detail::execute(spec, out, log);
}

/// Full program: parse, run, map exceptions to exit codes.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const RunSpec spec = parse_args(argc, argv);
    return run(spec, out, err);
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace ehrelay::io
