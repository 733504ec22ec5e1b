#include <cmath>
#include <filesystem>
#include <fstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "fracmp/nonlinearity.hpp"

using namespace fracmp;

namespace {

double integrate(const auto& fn, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 15, 1e-14);
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Canonical, ClosedFormValues) {
  const auto f = NonlinearitySpec::canonical(2.0);
  EXPECT_EQ(f(0.0), 0.0);
  EXPECT_EQ(f(-0.7), 0.0);
  EXPECT_EQ(f(1.0), 0.0);
  EXPECT_DOUBLE_EQ(f(0.5), 0.0625);
  EXPECT_DOUBLE_EQ(f(2.0), 4.0);
  EXPECT_DOUBLE_EQ(eval_f(f, 0.25), 0.0625 * 0.5625);
}

TEST(Canonical, PositiveOnUnitIntervalAndBeyond) {
  const auto f = NonlinearitySpec::canonical(2.0);
  for (double t = 0.01; t < 2.0; t += 0.01)
    if (std::abs(t - 1.0) > 1e-9) EXPECT_GT(f(t), 0.0) << "t = " << t;
}

TEST(Canonical, SmallArgumentBehavesLikePower) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto f = NonlinearitySpec::canonical(p);
    EXPECT_NEAR(f(1e-6) / std::pow(1e-6, p), 1.0, 1e-5);
  }
}

TEST(Canonical, RejectsExponentAtMostOne) {
  EXPECT_THROW(NonlinearitySpec::canonical(1.0), std::invalid_argument);
  EXPECT_THROW(NonlinearitySpec::canonical(0.5), std::invalid_argument);
}

TEST(Canonical, DerivativeMatchesFiniteDifference) {
  const auto f = NonlinearitySpec::canonical(2.0);
  for (double t : {0.1, 0.4, 0.8, 1.3}) {
    const double h = 1e-6;
    EXPECT_NEAR(f.derivative(t), (f(t + h) - f(t - h)) / (2 * h), 1e-8);
  }
}

TEST(Canonical, PrimitiveMatchesQuadrature) {
  for (double p : {2.0, 2.5}) {
    const auto f = NonlinearitySpec::canonical(p);
    for (double t : {0.0, 0.1, 0.5, 1.0, 1.7}) {
      const double expected = t > 0.0 ? integrate([&](double x) { return f(x); }, 0.0, t) : 0.0;
      EXPECT_NEAR(f.primitive(t), expected, 1e-13) << "p = " << p << ", t = " << t;
    }
  }
}

TEST(Truncation, AgreesBelowLevelAndPowerAbove) {
  const auto f = NonlinearitySpec::canonical(2.0);
  const TruncatedNonlinearity tr(f, 0.125);
  EXPECT_DOUBLE_EQ(tr.power_coefficient(), 0.765625);
  for (double t : {0.0, 0.03, 0.1, 0.125}) EXPECT_DOUBLE_EQ(tr(t), f(t));
  for (double t : {0.2, 1.0, 5.0}) EXPECT_DOUBLE_EQ(eval_truncated(tr, t), 0.765625 * t * t);
  EXPECT_EQ(tr(-0.05), 0.0);
  EXPECT_EQ(tr(-3.0), 0.0);
}

TEST(Truncation, ContinuousAtLevel) {
  const TruncatedNonlinearity tr(NonlinearitySpec::canonical(2.0), 0.125);
  EXPECT_NEAR(tr(0.125 - 1e-12), tr(0.125 + 1e-12), 1e-12);
  EXPECT_NEAR(tr.primitive(0.125 - 1e-12), tr.primitive(0.125 + 1e-12), 1e-12);
}

TEST(Truncation, PrimitiveMatchesQuadrature) {
  const TruncatedNonlinearity tr(NonlinearitySpec::canonical(2.0), 0.125);
  for (double t : {0.05, 0.125, 0.3, 2.0}) {
    const double expected = integrate([&](double x) { return tr(x); }, 0.0, t);
    EXPECT_NEAR(eval_primitive(tr, t), expected, 1e-13 * std::max(1.0, expected)) << "t = " << t;
  }
  EXPECT_EQ(tr.primitive(-1.0), 0.0);
}

TEST(Truncation, RejectsLevelOutsideUnitInterval) {
  const auto f = NonlinearitySpec::canonical(2.0);
  EXPECT_THROW(TruncatedNonlinearity(f, 0.0), std::invalid_argument);
  EXPECT_THROW(TruncatedNonlinearity(f, 1.0), std::invalid_argument);
}

TEST(AlphaBounds, CanonicalAtOneEighth) {
  const auto bounds = alpha_bounds(TruncatedNonlinearity(NonlinearitySpec::canonical(2.0), 0.125));
  EXPECT_NEAR(bounds.alpha0, 0.765625, 1e-12);
  EXPECT_NEAR(bounds.alpha1, 1.0, 1e-7);
  EXPECT_TRUE(bounds.condition);
}

TEST(AlphaBounds, ConditionFailsForLargeLevel) {
  const auto bounds = alpha_bounds(TruncatedNonlinearity(NonlinearitySpec::canonical(2.0), 0.25));
  EXPECT_NEAR(bounds.alpha0, 0.5625, 1e-12);
  EXPECT_FALSE(bounds.condition);
}

TEST(AlphaBounds, DefaultTruncationLevel) {
  EXPECT_DOUBLE_EQ(default_truncation_level(NonlinearitySpec::canonical(2.0)), 0.125);
}

TEST(AlphaBounds, DegenerateLowerEnvelopeThrows) {
  // f vanishes on (0.1, 0.2): f_R(t)/t^p is not bounded below for R = 0.5
  const auto f = NonlinearitySpec::table(2.0, {0.0, 0.1, 0.2, 1.0}, {0.0, 0.0, 0.0, 1.0});
  EXPECT_THROW(alpha_bounds(TruncatedNonlinearity(f, 0.5)), std::domain_error);
}

TEST(Table, InterpolatesAndClamps) {
  const auto f = NonlinearitySpec::table(2.0, {0.0, 1.0, 2.0}, {0.0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(f(0.5), 1.0);
  EXPECT_DOUBLE_EQ(f(1.5), 1.5);
  EXPECT_DOUBLE_EQ(f(3.0), 1.0);
  EXPECT_EQ(f(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(f.primitive(2.0), 1.0 + 1.5);
  EXPECT_DOUBLE_EQ(f.primitive(3.0), 2.5 + 1.0);
}

TEST(Table, LoadsTwoColumnFile) {
  const auto path = write_temp("fracmp_table_ok.txt", "# t f\n0 0\n\n0.5 0.25  # mid\n1 0\n");
  const auto f = load_nonlinearity_table(path, 2.0);
  EXPECT_EQ(f.variant(), NonlinearitySpec::Variant::table);
  EXPECT_EQ(f.table_t().size(), 3u);
  EXPECT_DOUBLE_EQ(f(0.25), 0.125);
}

TEST(Table, RejectsMalformedInput) {
  EXPECT_THROW(load_nonlinearity_table(write_temp("fracmp_neg.txt", "0 0\n1 -1\n"), 2.0), std::invalid_argument);
  EXPECT_THROW(load_nonlinearity_table(write_temp("fracmp_unsorted.txt", "0 0\n1 1\n0.5 1\n"), 2.0),
               std::invalid_argument);
  EXPECT_THROW(load_nonlinearity_table(write_temp("fracmp_short.txt", "0 0\n"), 2.0), std::invalid_argument);
  EXPECT_THROW(load_nonlinearity_table(write_temp("fracmp_cols.txt", "0 0\n1\n"), 2.0), std::invalid_argument);
  EXPECT_THROW(load_nonlinearity_table("/nonexistent/fracmp_table.txt", 2.0), std::runtime_error);
}

TEST(Shift, CanonicalEstimateOnUnitRange) {
  const auto f = NonlinearitySpec::canonical(2.0);
  // max of -f' on [0, 1] is attained at t = (3 + sqrt 3) / 6
  const double t = (3.0 + std::sqrt(3.0)) / 6.0;
  const double steepest = -f.derivative(t);
  const auto est = estimate_shift(f, 0.0, 1.0, 4096);
  EXPECT_NEAR(est.M0, 1.1 * steepest, 1e-4);
  EXPECT_TRUE(shift_is_monotone(f, est.M0, 0.0, 1.0, 10000));
  EXPECT_FALSE(shift_is_monotone(f, 0.5 * steepest, 0.0, 1.0, 10000));
}

TEST(Shift, RejectsBadSampling) {
  const auto f = NonlinearitySpec::canonical(2.0);
  EXPECT_THROW(estimate_shift(f, 1.0, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(estimate_shift(f, 0.0, 1.0, 1), std::invalid_argument);
}
