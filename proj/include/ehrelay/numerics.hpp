#pragma once

/// \file numerics.hpp
///
/// Adaptive Gauss-Kronrod quadrature and the generalized incomplete Gamma
/// function
///
///   Gamma(s, x; b) = int_x^inf t^(s-1) exp(-t - b/t) dt.
///
/// Semi-infinite integrals are compactified with u = 1/(1 + t - lower) and
/// integrated over u in (0, 1] by globally adaptive bisection with a 21-point
/// Kronrod panel (embedded 10-point Gauss rule for the error estimate).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "ehrelay/errors.hpp"

namespace ehrelay::numerics {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_subdivisions = 10000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1) {
      throw InvalidDomain("quadrature spec requires rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
    }
  }

  [[nodiscard]] QuadratureSpec with_rel_tol(double tol) const {
    QuadratureSpec out = *this;
    out.rel_tol = tol;
    return out;
  }
};

namespace detail {

// QUADPACK qk21 abscissae and weights.
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980380480, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
double checked_eval(F& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NonConvergent("integrand is not finite at " + std::to_string(x));
  }
  return v;
}

// One 21-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Panel kronrod_panel(F& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();

  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = checked_eval(f, center);

  double gauss = 0.0;
  double kronrod = kKronrodWeights[10] * fc;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> left{};
  std::array<double, 10> right{};

  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    left[j] = checked_eval(f, center - dx);
    right[j] = checked_eval(f, center + dx);
    const double pair = left[j] + right[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(left[j]) + std::abs(right[j]));
    if (j % 2 == 1) {
      gauss += kGaussWeights[j / 2] * pair;
    }
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
  }

  const double scale = std::abs(half);
  const double value = kronrod * half;
  abs_sum *= scale;
  asc *= scale;
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  if (abs_sum > tiny / (50.0 * eps)) {
    err = std::max(50.0 * eps * abs_sum, err);
  }
  return {lo, hi, value, err};
}

}  // namespace detail

/// Globally adaptive integration of f over the finite interval [lo, hi].
/// Stops when the summed error estimate is at most max(abs_tol, rel_tol*|I|).
template <class F>
double integrate_finite(F&& f, double lo, double hi, const QuadratureSpec& spec) {
  spec.validate();
  if (lo == hi) {
    return 0.0;
  }

  std::priority_queue<detail::Panel> panels;
  const detail::Panel first = detail::kronrod_panel(f, lo, hi);
  double total = first.value;
  double total_err = first.error;
  panels.push(first);

  auto converged = [&] { return total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (!converged()) {
    if (panels.size() >= spec.max_subdivisions) {
      throw NonConvergent("quadrature did not reach tolerance within " +
                          std::to_string(spec.max_subdivisions) + " subdivisions (error estimate " +
                          std::to_string(total_err) + ")");
    }
    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      throw NonConvergent("quadrature panel cannot be subdivided further");
    }
    panels.pop();
    const detail::Panel a = detail::kronrod_panel(f, worst.lo, mid);
    const detail::Panel b = detail::kronrod_panel(f, mid, worst.hi);
    total += a.value + b.value - worst.value;
    total_err += a.error + b.error - worst.error;
    panels.push(a);
    panels.push(b);
  }

  // Re-sum to shed the drift of the running update.
  double sum = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

/// Integral of f over [lower, inf) through the substitution u = 1/(1 + t - lower).
template <class F>
double integrate_semi_infinite(F&& f, double lower, const QuadratureSpec& spec) {
  if (!(lower >= 0.0) || !std::isfinite(lower)) {
    throw InvalidDomain("integrate_semi_infinite: lower limit must be finite and >= 0");
  }
  auto mapped = [&f, lower](double u) -> double {
    const double t = lower + (1.0 - u) / u;
    const double v = f(t);
    if (v == 0.0) {
      return 0.0;
    }
    const double jac = u * u;
    return jac == 0.0 ? 0.0 : v / jac;
  };
  return integrate_finite(mapped, 0.0, 1.0, spec);
}

namespace detail {

inline void check_gamma_args(double shape, double x, double b) {
  if (!(shape > 0.0) || !(x >= 0.0) || !(b >= 0.0) || !std::isfinite(x) || !std::isfinite(b)) {
    throw InvalidDomain("generalized incomplete gamma requires shape > 0, x >= 0, b >= 0");
  }
}

}  // namespace detail

/// exp(x) * Gamma(shape, x; b), i.e. int_0^inf (s+x)^(shape-1) exp(-s - b/(s+x)) ds.
/// Stays O(1) for large x where Gamma itself underflows.
inline double gen_inc_gamma_scaled(double shape, double x, double b, const QuadratureSpec& spec = {}) {
  detail::check_gamma_args(shape, x, b);
  if (x == 0.0 && b == 0.0) {
    return std::tgamma(shape);
  }
  auto integrand = [shape, x, b](double s) {
    const double t = s + x;
    const double power = shape == 1.0 ? 1.0 : std::pow(t, shape - 1.0);
    return power * std::exp(-s - b / t);
  };
  return integrate_semi_infinite(integrand, 0.0, spec);
}

/// Generalized incomplete Gamma function Gamma(shape, x; b).
inline double gen_inc_gamma(double shape, double x, double b, const QuadratureSpec& spec = {}) {
  detail::check_gamma_args(shape, x, b);
  if (x == 0.0 && b == 0.0) {
    return std::tgamma(shape);
  }
  const double damping = std::exp(-x);
  if (damping == 0.0) {
    return 0.0;
  }
  return damping * gen_inc_gamma_scaled(shape, x, b, spec);
}

/// exp(x) * [Gamma(shape, x; 0) - Gamma(shape, x; b)], evaluated without
/// cancellation: int_0^inf (s+x)^(shape-1) exp(-s) (1 - exp(-b/(s+x))) ds.
inline double gen_inc_gamma_complement_scaled(double shape, double x, double b,
                                              const QuadratureSpec& spec = {}) {
  detail::check_gamma_args(shape, x, b);
  if (b == 0.0) {
    return 0.0;
  }
  auto integrand = [shape, x, b](double s) {
    const double t = s + x;
    const double power = shape == 1.0 ? 1.0 : std::pow(t, shape - 1.0);
    return power * std::exp(-s) * -std::expm1(-b / t);
  };
  return integrate_semi_infinite(integrand, 0.0, spec);
}

}  // namespace ehrelay::numerics
