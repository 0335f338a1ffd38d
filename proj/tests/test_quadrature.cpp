#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/quadrature.hpp"

using namespace casimir;

namespace {

// 2 zeta(3) = sum_{n>=1} 2/n^3, summed until the remainder (< 1/N^2) is below 1e-12.
double two_zeta3_oracle() {
  double s = 0.0;
  for (int n = 2'000'000; n >= 1; --n) {
    const double dn = n;
    s += 2.0 / (dn * dn * dn);
  }
  return s;
}

// pi^2/6 from partial sums S_N with two Richardson steps in 1/N.
double basel_oracle() {
  auto partial = [](int N) {
    double s = 0.0;
    for (int n = N; n >= 1; --n) s += 1.0 / (static_cast<double>(n) * n);
    return s;
  };
  auto r1 = [&](int N) { return 2.0 * partial(2 * N) - partial(N); };
  return (4.0 * r1(2000) - r1(1000)) / 3.0;
}

double bose_u2(double u) { return u * u / std::expm1(u); }

struct Case {
  double (*f)(double);
  double lower;
  double exact;
};

}  // namespace

TEST(Oracles, FrozenValues) {
  EXPECT_NEAR(two_zeta3_oracle(), 2.0 * zeta3, 1e-12);
  EXPECT_NEAR(two_zeta3_oracle(), 2.4041138063191885, 1e-12);
  EXPECT_NEAR(basel_oracle(), pi * pi / 6.0, 1e-10);
}

TEST(SemiInfinite, Exponential) {
  const auto r = integrate_semi_infinite([](double u) { return std::exp(-u); }, 0.0, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_GE(r.evaluations, 1u);
}

TEST(SemiInfinite, ShiftedExponential) {
  for (double a : {-2.0, 0.5, 3.0, 40.0}) {
    const auto r = integrate_semi_infinite([](double u) { return std::exp(-u); }, a, {});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value / std::exp(-a), 1.0, 1e-12) << a;
  }
}

TEST(SemiInfinite, BoseIntegralIsTwoZeta3) {
  const auto r = integrate_semi_infinite(bose_u2, 0.0, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.4041138063191885, 1e-9);
  EXPECT_LE(r.abs_error_estimate, 1e-10 * r.value);
  EXPECT_LE(std::fabs(r.value - two_zeta3_oracle()), r.abs_error_estimate + 1e-13);
}

TEST(SemiInfinite, ReportedErrorRespectsTolerance) {
  const Tolerance tol{1e-8, 0.0, 1'000'000};
  const auto r = integrate_semi_infinite(bose_u2, 0.0, tol);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.abs_error_estimate, std::max(tol.abs_tol, tol.rel_tol * std::fabs(r.value)));
}

TEST(SemiInfinite, Linearity) {
  const auto base = integrate_semi_infinite(bose_u2, 0.0, {});
  for (double alpha : {-2.0, 0.5, 10.0}) {
    const auto scaled =
        integrate_semi_infinite([alpha](double u) { return alpha * bose_u2(u); }, 0.0, {});
    const double allowed = scaled.abs_error_estimate + std::fabs(alpha) * base.abs_error_estimate;
    EXPECT_LE(std::fabs(scaled.value - alpha * base.value), allowed) << alpha;
  }
}

TEST(SemiInfinite, TighterToleranceNeverWorse) {
  const std::vector<Case> cases{
      {[](double u) { return std::exp(-u); }, 0.0, 1.0},
      {[](double u) { return std::exp(-u); }, 2.0, std::exp(-2.0)},
      {bose_u2, 0.0, 2.0 * zeta3},
  };
  for (const auto& c : cases) {
    double previous = std::numeric_limits<double>::infinity();
    for (double rel : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11}) {
      const auto r = integrate_semi_infinite(c.f, c.lower, Tolerance{rel, 0.0, 1'000'000});
      ASSERT_TRUE(r.converged);
      const double achieved = std::fabs(r.value - c.exact);
      // Allow for rounding noise once the exact digits are exhausted.
      EXPECT_LE(achieved, previous + 4 * std::numeric_limits<double>::epsilon() * c.exact)
          << "rel_tol " << rel;
      previous = achieved;
    }
  }
}

TEST(SemiInfinite, Deterministic) {
  const auto a = integrate_semi_infinite(bose_u2, 0.0, {});
  const auto b = integrate_semi_infinite(bose_u2, 0.0, {});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.abs_error_estimate, b.abs_error_estimate);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(SemiInfinite, BudgetExhaustionIsReported) {
  const auto r = integrate_semi_infinite(bose_u2, 0.0, Tolerance{1e-14, 0.0, 100});
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 100u);
}

TEST(SemiInfinite, NonFiniteIntegrandThrows) {
  EXPECT_THROW(integrate_semi_infinite([](double) { return std::nan(""); }, 0.0, {}),
               ConvergenceError);
  EXPECT_THROW(integrate_semi_infinite(
                   [](double u) { return u > 1.0 ? std::numeric_limits<double>::infinity() : 0.0; },
                   0.0, {}),
               ConvergenceError);
}

TEST(Tolerance, Validation) {
  EXPECT_THROW((Tolerance{0.0, 0.0, 10}.validate()), InputError);
  EXPECT_THROW((Tolerance{1e-8, -1.0, 10}.validate()), InputError);
  EXPECT_THROW((Tolerance{1e-8, 0.0, 0}.validate()), InputError);
  EXPECT_NO_THROW(Tolerance{}.validate());
  EXPECT_EQ(Tolerance{}.rel_tol, 1e-10);
  EXPECT_EQ(Tolerance{}.abs_tol, 1e-30);
  EXPECT_EQ(Tolerance{}.max_evals, 1'000'000u);
}

TEST(Interval, PolynomialExactAndEmpty) {
  const auto r = integrate_interval([](double x) { return 3.0 * x * x; }, 0.0, 2.0, {});
  EXPECT_NEAR(r.value, 8.0, 1e-13);
  const auto empty = integrate_interval([](double x) { return x; }, 1.0, 1.0, {});
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_THROW(integrate_interval([](double x) { return x; }, 1.0, 0.0, {}), InputError);
}

TEST(Series, GeometricWithHalfFirstTerm) {
  const auto r = sum_series([](std::size_t n) { return std::pow(0.5, static_cast<double>(n)); },
                            true, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.5, 1e-10);
  EXPECT_LE(std::fabs(r.value - 1.5), r.abs_error_estimate * 1.0001);
}

TEST(Series, GeometricFullWeight) {
  const auto r = sum_series([](std::size_t n) { return std::pow(0.5, static_cast<double>(n)); },
                            false, {});
  EXPECT_NEAR(r.value, 2.0, 1e-10);
}

TEST(Series, ZeroSeries) {
  const auto r = sum_series([](std::size_t) { return 0.0; }, true, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.abs_error_estimate, 0.0);
}

TEST(Series, Basel) {
  const double oracle = basel_oracle();
  auto term = [](std::size_t n) {
    const double k = static_cast<double>(n + 1);
    return 1.0 / (k * k);
  };
  // The stopping rule leaves an O(1/N) tail on this slowly converging series.
  const auto r = sum_series(term, false, Tolerance{1e-12, 0.0, 1'000'000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.6449341, 2e-6);
  EXPECT_LT(r.value, oracle);
  // Geometric tail estimate is within a factor of two for 1/n^2.
  EXPECT_LE(oracle - r.value, 2.0 * r.abs_error_estimate + 1e-12);
}

TEST(Series, IndexCapIsReported) {
  const auto r = sum_series([](std::size_t) { return 1.0; }, false, Tolerance{1e-10, 0.0, 1000});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.evaluations, 1000u);
}

TEST(Series, NonFiniteTermThrows) {
  EXPECT_THROW(sum_series([](std::size_t n) { return n == 3 ? std::nan("") : 1.0 / (n + 1.0); },
                          false, {}),
               ConvergenceError);
}

TEST(Series, PropagatesTermErrors) {
  auto term = [](std::size_t n) {
    return QuadratureResult{std::pow(0.25, static_cast<double>(n)), 1e-12, 15, true};
  };
  const auto r = sum_series(term, true, {});
  EXPECT_NEAR(r.value, 0.5 + 1.0 / 3.0, 1e-10);
  EXPECT_GE(r.abs_error_estimate, 0.5e-12 + 1e-12 * static_cast<double>(r.evaluations - 1));

  auto failing = [](std::size_t n) {
    return QuadratureResult{std::pow(0.25, static_cast<double>(n)), 0.0, 15, n != 2};
  };
  EXPECT_FALSE(sum_series(failing, true, {}).converged);
}
