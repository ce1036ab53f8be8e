#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ehrelay/numerics.hpp"

namespace {

using ehrelay::numerics::gen_inc_gamma;
using ehrelay::numerics::gen_inc_gamma_complement_scaled;
using ehrelay::numerics::gen_inc_gamma_scaled;
using ehrelay::numerics::integrate_finite;
using ehrelay::numerics::integrate_semi_infinite;
using ehrelay::numerics::QuadratureSpec;

// Midpoint Riemann sum of exp(-t - 1/t) over [1, 60] with step 1e-6
// (59e6 panels, double precision), computed once offline.
constexpr double kRiemannGamma1_1_1 = 0.20753352343482873;

TEST(IntegrateSemiInfinite, Exponential) {
  const QuadratureSpec spec;
  EXPECT_NEAR(integrate_semi_infinite([](double t) { return std::exp(-t); }, 0.0, spec), 1.0, 1e-12);
  EXPECT_NEAR(integrate_semi_infinite([](double t) { return std::exp(-t); }, 2.0, spec), std::exp(-2.0), 1e-13);
  EXPECT_NEAR(integrate_semi_infinite([](double t) { return t * std::exp(-t); }, 0.0, spec), 1.0, 1e-12);
}

TEST(IntegrateSemiInfinite, SignChangingIntegrand) {
  // int_0^inf e^{-t} cos t dt = 1/2
  const double v = integrate_semi_infinite([](double t) { return std::exp(-t) * std::cos(t); }, 0.0, {});
  EXPECT_NEAR(v, 0.5, 1e-11);
}

TEST(IntegrateSemiInfinite, SlowScaleNeedsSubdivision) {
  // Mean 1e4 exponential: the mapped integrand is concentrated near u = 0.
  const double v = integrate_semi_infinite([](double t) { return std::exp(-t / 1e4) / 1e4; }, 0.0, {});
  EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(IntegrateSemiInfinite, RejectsNegativeLowerLimit) {
  EXPECT_THROW(integrate_semi_infinite([](double t) { return std::exp(-t); }, -1.0, {}), ehrelay::InvalidDomain);
}

TEST(IntegrateSemiInfinite, NonConvergentWhenBudgetTooSmall) {
  QuadratureSpec spec;
  spec.max_subdivisions = 1;
  spec.rel_tol = 1e-14;
  EXPECT_THROW(integrate_semi_infinite([](double t) { return std::exp(-t / 1e4); }, 0.0, spec),
               ehrelay::NonConvergent);
}

TEST(IntegrateFinite, RejectsBadSpec) {
  QuadratureSpec spec;
  spec.rel_tol = 0.0;
  EXPECT_THROW(integrate_finite([](double) { return 1.0; }, 0.0, 1.0, spec), ehrelay::InvalidDomain);
}

TEST(IntegrateFinite, NonFiniteIntegrandIsReported) {
  EXPECT_THROW(integrate_finite([](double x) { return 1.0 / (x - 0.5) / 0.0; }, 0.0, 1.0, {}),
               ehrelay::NonConvergent);
}

TEST(GenIncGamma, ReducesToExponential) {
  EXPECT_NEAR(gen_inc_gamma(1.0, 0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(gen_inc_gamma(1.0, 2.0, 0.0) / std::exp(-2.0), 1.0, 1e-10);
}

TEST(GenIncGamma, MatchesBruteForceRiemannSum) {
  // Riemann sum truncation at 60 and O(h^2) error are far below 1e-10.
  EXPECT_NEAR(gen_inc_gamma(1.0, 1.0, 1.0), kRiemannGamma1_1_1, 1e-10);
}

TEST(GenIncGamma, CompleteGammaCorner) {
  EXPECT_DOUBLE_EQ(gen_inc_gamma(2.5, 0.0, 0.0), std::tgamma(2.5));
  EXPECT_DOUBLE_EQ(gen_inc_gamma(0.3, 0.0, 0.0), std::tgamma(0.3));
}

TEST(GenIncGamma, GeneralShapeAgainstUpperIncompleteGamma) {
  // Gamma(2, x) = (1 + x) e^{-x}; Gamma(3, x) = (x^2 + 2x + 2) e^{-x}
  for (double x : {0.1, 1.0, 4.0, 12.0}) {
    EXPECT_NEAR(gen_inc_gamma(2.0, x, 0.0) / ((1 + x) * std::exp(-x)), 1.0, 1e-10) << x;
    EXPECT_NEAR(gen_inc_gamma(3.0, x, 0.0) / ((x * x + 2 * x + 2) * std::exp(-x)), 1.0, 1e-10) << x;
  }
}

TEST(GenIncGamma, BesselIdentityAtZeroLowerLimit) {
  // int_0^inf exp(-t - b/t) dt = 2 sqrt(b) K_1(2 sqrt(b)); for b = 1, 2 K_1(2).
  const double two_k1_of_2 = 2.0 * 0.1398658818165224;
  EXPECT_NEAR(gen_inc_gamma(1.0, 0.0, 1.0), two_k1_of_2, 1e-10);
}

TEST(GenIncGamma, DomainErrors) {
  EXPECT_THROW(gen_inc_gamma(0.0, 1.0, 1.0), ehrelay::InvalidDomain);
  EXPECT_THROW(gen_inc_gamma(1.0, -1.0, 1.0), ehrelay::InvalidDomain);
  EXPECT_THROW(gen_inc_gamma(1.0, 1.0, -1.0), ehrelay::InvalidDomain);
}

TEST(GenIncGamma, UnderflowsGracefullyForLargeX) {
  EXPECT_EQ(gen_inc_gamma(1.0, 800.0, 1.0), 0.0);
  EXPECT_NEAR(gen_inc_gamma_scaled(1.0, 800.0, 0.0), 1.0, 1e-12);
}

TEST(GenIncGammaProperties, SandwichAndMonotonicity) {
  const std::vector<double> xs{0.05, 0.2, 0.7, 1.5, 3.0, 8.0};
  const std::vector<double> bs{0.0, 0.01, 0.3, 1.0, 5.0, 40.0};
  for (double shape : {0.5, 1.0, 2.5}) {
    for (double x : xs) {
      const double top = gen_inc_gamma(shape, x, 0.0);
      double prev_b = top;
      for (double b : bs) {
        const double g = gen_inc_gamma(shape, x, b);
        EXPECT_LE(g, top * (1 + 1e-12)) << shape << ' ' << x << ' ' << b;
        EXPECT_GE(g, std::exp(-b / x) * top * (1 - 1e-12)) << shape << ' ' << x << ' ' << b;
        EXPECT_LE(g, prev_b * (1 + 1e-12));
        prev_b = g;
      }
    }
    for (double b : bs) {
      double prev_x = gen_inc_gamma(shape, xs.front(), b);
      for (double x : xs) {
        const double g = gen_inc_gamma(shape, x, b);
        EXPECT_LE(g, prev_x * (1 + 1e-12));
        prev_x = g;
      }
    }
  }
}

TEST(GenIncGammaProperties, ComplementIsTheDifference) {
  for (double x : {0.0, 0.3, 2.0}) {
    for (double b : {0.01, 0.5, 3.0}) {
      const double direct = gen_inc_gamma(1.0, x, 0.0) - gen_inc_gamma(1.0, x, b);
      const double comp = std::exp(-x) * gen_inc_gamma_complement_scaled(1.0, x, b);
      EXPECT_NEAR(comp, direct, 1e-11 * std::max(1.0, direct)) << x << ' ' << b;
    }
  }
  EXPECT_EQ(gen_inc_gamma_complement_scaled(1.0, 2.0, 0.0), 0.0);
}

TEST(GenIncGammaProperties, HalvingToleranceStaysWithinPreviousBound) {
  for (double x : {0.1, 1.0, 5.0}) {
    for (double b : {0.0, 0.2, 2.0, 20.0}) {
      QuadratureSpec spec;
      spec.rel_tol = 1e-6;
      for (int k = 0; k < 8; ++k) {
        const double coarse = gen_inc_gamma(1.0, x, b, spec);
        const QuadratureSpec finer = spec.with_rel_tol(spec.rel_tol / 2);
        const double fine = gen_inc_gamma(1.0, x, b, finer);
        EXPECT_LE(std::abs(coarse - fine), std::max(spec.abs_tol, spec.rel_tol * std::abs(coarse)))
            << x << ' ' << b << ' ' << spec.rel_tol;
        spec = finer;
      }
    }
  }
}

}  // namespace
