#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ineqforge/baseline.hpp"
#include "ineqforge/conversions.hpp"
#include "ineqforge/errors.hpp"
#include "ineqforge/numeric.hpp"

using namespace ineqforge;

namespace {

RateFunction rate(std::function<double(double)> log_beta_of_log_s) {
  return RateFunction(std::move(log_beta_of_log_s), ClassTag::tabulated(), {}, Validity{});
}

RateFunction reciprocal(double c) {
  return rate([c](double log_s) { return std::log(c) - log_s; });
}

RateFunction constant(double b) {
  return rate([b](double) { return std::log(b); });
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ineqforge::Error was thrown";
  return ErrorCode::invalid_argument;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Conversions, XiOfReciprocalRate) {
  // sup_u (1/u - c / (u^2 t)) is reached at u = 2c/t and equals t / (4c).
  for (double c : {0.5, 2.0}) {
    for (double t : {0.1, 1.0, 10.0}) {
      EXPECT_LT(rel(xi_from_beta(reciprocal(c), t), t / (4.0 * c)), 1e-9);
    }
  }
}

TEST(Conversions, XiOfConstantRate) {
  EXPECT_EQ(xi_from_beta(constant(0.5), 0.25), 0.0);
  EXPECT_EQ(xi_from_beta(constant(0.5), 0.5), 0.0);
  EXPECT_EQ(xi_from_beta(constant(0.5), 1.0), kInf);
}

TEST(Conversions, XiIsNonDecreasing) {
  const auto leb = rate([](double log_s) { return lebesgue_log_beta(1, std::exp(log_s)); });
  double prev = 0.0;
  for (double t : logspace(1e-3, 1e3, 25)) {
    const double xi = xi_from_beta(leb, t);
    EXPECT_GE(xi, prev * (1.0 - 1e-12));
    prev = xi;
  }
}

TEST(Conversions, FSobolevOfReciprocalRate) {
  const double c = 0.5, C1 = 2.0, C2 = 1.0;
  for (double u : {0.5, 4.0, 100.0}) {
    const double expected = C1 * u / (16.0 * c) - C2;
    EXPECT_NEAR(fsob_from_beta(reciprocal(c), C1, C2, u), expected, 1e-8 * std::max(1.0, expected));
  }
  EXPECT_EQ(fsob_from_beta(reciprocal(c), 0.0, 3.0, 7.0), -3.0);
}

TEST(Conversions, FSobolevGrowthOfLebesgueRate) {
  for (int n : {1, 2}) {
    const auto leb = rate([n](double log_s) { return lebesgue_log_beta(n, std::exp(log_s)); });
    const auto u = logspace(1e2, 1e4, 5);
    std::vector<double> x, y;
    for (double v : u) {
      x.push_back(std::log(v));
      y.push_back(std::log(fsob_from_beta(leb, 1.0, 0.0, v)));
    }
    EXPECT_NEAR(fit_line(x, y).slope, 2.0 / n, 0.1) << "n=" << n;
  }
}

TEST(Conversions, DivergentXiIsReported) {
  EXPECT_EQ(code_of([] { (void)fsob_from_beta(constant(0.5), 1.0, 1.0, 4.0); }),
            ErrorCode::xi_diverges);
}

TEST(Conversions, InverseOfFSobolevFunction) {
  FSobDescriptor log_f;
  log_f.F = [](double v) { return std::log(v); };
  log_f.u_star = 1.0;
  EXPECT_LT(rel(beta_from_fsob(log_f, 1.0, 1.0, 1.0), std::exp(2.0)), 1e-12);
  EXPECT_EQ(code_of([&] { (void)log_f.inverse(-1.0); }), ErrorCode::not_invertible);

  FSobDescriptor identity;
  identity.F = [](double v) { return v; };
  identity.u_star = 0.0 + 1e-300;
  for (double u : {0.5, 1.0, 3.0}) {
    EXPECT_LT(rel(beta_from_fsob(identity, 2.0, 3.0, u), 2.0 * 3.0 * (1.0 + 1.0 / u)), 1e-12);
  }
  double prev = kInf;
  for (double u : logspace(0.01, 100.0, 20)) {
    const double b = beta_from_fsob(log_f, 1.0, 1.0, u);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(Conversions, DescriptorFindsPositiveTail) {
  const FSobDescriptor d = fsob_descriptor(reciprocal(0.5));
  // F(u) = u / 8 - 1 is positive beyond u = 8.
  EXPECT_GT(d.u_star, 8.0);
  EXPECT_LT(d.u_star, 8.0 * std::pow(1e9, 1.0 / 45.0) * 1.0001);
  EXPECT_GT(d.F(d.u_star), 0.0);
}

TEST(Conversions, DetectsDefectiveLogSobolevShape) {
  std::vector<std::pair<double, double>> samples;
  for (double u : logspace(0.01, 1.0, 12)) samples.emplace_back(u, 2.0 * std::exp(3.0 / u));
  const DlsiFit fit = detect_dlsi(samples);
  EXPECT_TRUE(fit.is_dlsi);
  EXPECT_NEAR(fit.c, 2.0, 1e-9);
  EXPECT_NEAR(fit.c_prime, 3.0, 1e-9);
}

TEST(Conversions, PolynomialShapeIsNotDefectiveLogSobolev) {
  std::vector<std::pair<double, double>> samples;
  for (double u : logspace(0.01, 1.0, 12)) samples.emplace_back(u, std::pow(u, -0.5));
  EXPECT_FALSE(detect_dlsi(samples).is_dlsi);
}

TEST(Conversions, FlatInputIsDegenerate) {
  std::vector<std::pair<double, double>> samples;
  for (double u : logspace(0.01, 1.0, 12)) samples.emplace_back(u, 3.0);
  const DlsiFit fit = detect_dlsi(samples);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.c_prime, 0.0);
}

TEST(Conversions, DetectDlsiValidatesInput) {
  std::vector<std::pair<double, double>> few = {{0.01, 1.0}, {1.0, 1.0}};
  EXPECT_EQ(code_of([&] { (void)detect_dlsi(few); }), ErrorCode::invalid_argument);
  std::vector<std::pair<double, double>> narrow;
  for (double u : linspace(0.5, 1.0, 10)) narrow.emplace_back(u, std::exp(1.0 / u));
  EXPECT_EQ(code_of([&] { (void)detect_dlsi(narrow); }), ErrorCode::invalid_argument);
}

TEST(Conversions, RothausTightening) {
  EXPECT_DOUBLE_EQ(rothaus_tighten(4.0, 1.0, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(rothaus_tighten(4.0, 0.0, 1.0), 6.0);
  const double a = rothaus_tighten(1.0, 0.5, 1.0);
  const double b = rothaus_tighten(1.0, 0.5, 2.0);
  const double c = rothaus_tighten(1.0, 0.5, 3.0);
  EXPECT_DOUBLE_EQ(c - b, b - a);
  EXPECT_EQ(code_of([] { (void)rothaus_tighten(1.0, -1.0, 1.0); }), ErrorCode::invalid_argument);
}

TEST(Conversions, FSobolevCsv) {
  FSobDescriptor d;
  d.F = [](double v) { return v; };
  const std::vector<double> u = {1.0, 2.0};
  EXPECT_EQ(fsob_csv(d, u), "u,F\n1,1\n2,2\n");
}
