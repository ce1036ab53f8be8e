#pragma once

/// \file analytic.hpp
///
/// Closed-form outage analysis.
///
/// Per relay, let C be the event that the relay decodes (first-hop SINR at or
/// above threshold) and Z = (snr_h + inr) 1_C the harvested-power factor. The
/// destination SNR through relay i is W_i Z_i with W_i exponential of mean
/// `second_hop_scale`. A relay "fails" when W_i Z_i < threshold, which covers
/// both decoding failure and a weak second hop; relays fail independently, so
/// total outage is the L-th power of the per-relay failure probability.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "ehrelay/errors.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/numerics.hpp"

namespace ehrelay::analytic {

enum class Branch { general, interference_free, degenerate_equal_rates, forced_outage };

inline std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::general: return "general";
    case Branch::interference_free: return "interference_free";
    case Branch::degenerate_equal_rates: return "degenerate_equal_rates";
    case Branch::forced_outage: return "forced_outage";
  }
  return "?";
}

struct OutagePoint {
  double first_hop_fail = 1.0;  // Pr{SINR_SR < threshold}
  double joint_below = 1.0;     // Pr{SNR_RD * 1_C < threshold}
  double outage = 1.0;
  Branch branch = Branch::forced_outage;
};

/// Relative SNR/INR gap below which the closed form is treated as degenerate.
inline constexpr double kDegenerateGap = 1e-9;
/// Relative nudge applied to the INR on both sides of a degenerate point.
inline constexpr double kDegenerateNudge = 1e-6;
/// Finest relative tolerance requested from the quadrature when cancelling terms.
inline constexpr double kFinestRelTol = 1e-13;

inline double relative_rate_gap(const DerivedRates& rates) {
  return std::abs(rates.first_hop_snr - rates.first_hop_inr) /
         std::max(rates.first_hop_snr, rates.first_hop_inr);
}

/// Pr{SINR_SR >= threshold} = exp(-th/snr) / (1 + th*inr/snr).
inline double first_hop_success(const DerivedRates& rates, double threshold) {
  const double snr = rates.first_hop_snr;
  return std::exp(-threshold / snr) / (1.0 + rates.first_hop_inr / snr * threshold);
}

/// 1 - first_hop_success, free of cancellation for small thresholds.
inline double first_hop_failure(const DerivedRates& rates, double threshold) {
  const double x = threshold / rates.first_hop_snr;
  const double y = rates.first_hop_inr / rates.first_hop_snr * threshold;
  return (y - std::expm1(-x)) / (1.0 + y);
}

/// Density of Z on z > threshold (the decoding part; Z has an atom at 0 of
/// mass first_hop_failure). Written with expm1 so that it stays finite and
/// accurate as snr and inr coincide.
inline double conditional_pdf_z(const DerivedRates& rates, double threshold, double z) {
  if (!(z > threshold)) return 0.0;
  const double snr = rates.first_hop_snr;
  const double decay = std::exp(-z / snr);
  if (rates.interference_free) return decay / snr;

  const double inr = rates.first_hop_inr;
  const double gap = rates.rate_gap();
  const double u = (z - threshold) / (1.0 + threshold);
  if (gap == 0.0) return decay * u / (snr * inr);
  const double denom = gap * snr * inr;
  if (gap * u > -1.0) return decay * -std::expm1(-gap * u) / denom;
  // gap < 0 and large u: both exponentials are finite because combined_decay > 0.
  return (decay - std::exp(-z / snr - gap * u)) / denom;
}

namespace detail {

// Pr{W Z < th, C} = int_{th}^inf (1 - exp(-th/(scale z))) f_Z(z) dz,
// expressed through the complementary generalized incomplete Gamma function.
inline double second_hop_shortfall(const DerivedRates& rates, double threshold,
                                   const numerics::QuadratureSpec& spec) {
  const double snr = rates.first_hop_snr;
  const double scale = rates.second_hop_scale;
  const double x1 = threshold / snr;
  const double damping = std::exp(-x1);
  const double s1 = numerics::gen_inc_gamma_complement_scaled(1.0, x1, threshold / (snr * scale), spec);
  if (rates.interference_free) return damping * s1;

  const double b = rates.combined_decay(threshold);
  const double s2 = numerics::gen_inc_gamma_complement_scaled(1.0, b * threshold, b * threshold / scale, spec);
  return damping * (snr * s1 - s2 / b) / (snr - rates.first_hop_inr);
}

inline numerics::QuadratureSpec tightened(const numerics::QuadratureSpec& spec, double rel_gap) {
  const double tol = std::clamp(spec.rel_tol * std::min(1.0, rel_gap), kFinestRelTol, spec.rel_tol);
  return spec.with_rel_tol(tol);
}

}  // namespace detail

/// Pr{SNR_RD * 1_C < threshold}, the per-relay failure probability.
///
/// Evaluated as first_hop_failure + Pr{W Z < th, C}; substituting
/// Gamma(1,x;c) = exp(-x) - complement(x;c) into the textbook closed form
/// gives exactly this split, which avoids computing 1 - (something near 1).
inline double joint_cdf_below(const DerivedRates& rates, double threshold,
                              const numerics::QuadratureSpec& spec = {}) {
  if (rates.zero_harvest) return 1.0;
  const double fail = first_hop_failure(rates, threshold);
  if (rates.interference_free) {
    return std::min(1.0, fail + detail::second_hop_shortfall(rates, threshold, spec));
  }

  const double gap = relative_rate_gap(rates);
  if (gap < kDegenerateGap) {
    // Symmetric nudge of the INR: the first-order perturbation cancels.
    const auto nudge_spec = detail::tightened(spec, kDegenerateNudge);
    DerivedRates lo = rates;
    DerivedRates hi = rates;
    const double base = rates.first_hop_snr;
    lo.first_hop_inr = base * (1.0 - kDegenerateNudge);
    hi.first_hop_inr = base * (1.0 + kDegenerateNudge);
    const double shortfall = 0.5 * (detail::second_hop_shortfall(lo, threshold, nudge_spec) +
                                    detail::second_hop_shortfall(hi, threshold, nudge_spec));
    return std::min(1.0, fail + shortfall);
  }
  const double shortfall = detail::second_hop_shortfall(rates, threshold, detail::tightened(spec, gap));
  return std::min(1.0, fail + shortfall);
}

/// The closed form exactly as usually printed, 1 - [...] with Gamma(1, x; c).
/// Loses relative accuracy when the result is small; kept for cross-checks.
inline double joint_cdf_below_textbook(const DerivedRates& rates, double threshold,
                                       const numerics::QuadratureSpec& spec = {}) {
  if (rates.zero_harvest) return 1.0;
  const double snr = rates.first_hop_snr;
  const double scale = rates.second_hop_scale;
  const double g1 = numerics::gen_inc_gamma(1.0, threshold / snr, threshold / (snr * scale), spec);
  if (rates.interference_free) return 1.0 - g1;
  const double inr = rates.first_hop_inr;
  if (relative_rate_gap(rates) < kDegenerateGap) {
    throw DegenerateRates("textbook closed form is singular when SNR and INR coincide");
  }
  const double a = rates.rate_gap();
  const double b = rates.combined_decay(threshold);
  const double g2 = numerics::gen_inc_gamma(1.0, b * threshold, b * threshold / scale, spec);
  return 1.0 - (snr * g1 - std::exp(a * threshold / (1.0 + threshold)) * g2 / b) / (snr - inr);
}

/// Total outage, literally summed over the decoding-set size:
/// p^L * sum_l C(L,l) (J/p - 1)^l with p = first-hop failure, J = joint_below.
/// Each term is taken as C(L,l) p^(L-l) (J-p)^l, which is the same number
/// but cannot overflow when p is tiny.
inline double total_outage_literal(double first_hop_fail, double joint_below, std::size_t relays) {
  const double p = first_hop_fail;
  const double excess = std::max(0.0, joint_below - p);
  const auto n = static_cast<double>(relays);
  double sum = 0.0;
  double binom = 1.0;
  for (std::size_t l = 0; l <= relays; ++l) {
    const auto k = static_cast<double>(l);
    sum += binom * std::pow(p, n - k) * std::pow(excess, k);
    binom = binom * (n - k) / (k + 1.0);
  }
  return sum;
}

/// Total outage from rates, summed over the size of the decoding set.
/// The sum equals joint_below^L by the binomial theorem.
inline OutagePoint outage_probability(const DerivedRates& rates, double threshold, std::size_t relays,
                                      const numerics::QuadratureSpec& spec = {}) {
  if (relays < 1) throw ValidationError("outage_probability requires at least one relay");
  OutagePoint point;
  point.first_hop_fail = first_hop_failure(rates, threshold);
  if (rates.zero_harvest) {
    point.joint_below = 1.0;
    point.outage = 1.0;
    point.branch = Branch::forced_outage;
    return point;
  }
  point.joint_below = joint_cdf_below(rates, threshold, spec);
  point.outage = total_outage_literal(point.first_hop_fail, point.joint_below, relays);
  if (rates.interference_free) {
    point.branch = Branch::interference_free;
  } else if (relative_rate_gap(rates) < kDegenerateGap) {
    point.branch = Branch::degenerate_equal_rates;
  } else {
    point.branch = Branch::general;
  }
  return point;
}

/// Total outage for a config, short-circuiting split in {0, 1} to outage 1.
inline OutagePoint evaluate(const SystemConfig& config, const numerics::QuadratureSpec& spec = {}) {
  config.validate();
  if (config.power_split == 1.0) return OutagePoint{1.0, 1.0, 1.0, Branch::forced_outage};
  return outage_probability(derive_rates(config), config.threshold, config.relays, spec);
}

/// Pr{SINR_SR >= threshold} for a config, 0 when split is 1.
inline double first_hop_success(const SystemConfig& config) {
  config.validate();
  if (config.power_split == 1.0) return 0.0;
  return first_hop_success(derive_rates(config), config.threshold);
}

}  // namespace ehrelay::analytic
