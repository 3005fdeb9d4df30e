#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "ineqforge/numeric.hpp"
#include "ineqforge/rate_function.hpp"

using namespace ineqforge;

namespace {

RateFunction from_log(std::function<double(double)> log_beta_of_log_s, Validity v = {}) {
  return RateFunction(std::move(log_beta_of_log_s), ClassTag::tabulated(), {}, v);
}

}  // namespace

TEST(RateFunction, ValueAndValidity) {
  const auto rate = from_log([](double log_s) { return -0.5 * log_s; }, Validity{0.0, 1.0});
  EXPECT_NEAR(rate.value(0.25), 2.0, 1e-14);
  EXPECT_EQ(rate.log_value(2.0), kInf);
  EXPECT_EQ(rate.value(2.0), kInf);
  EXPECT_FALSE(Validity{}.contains(0.0));
  EXPECT_TRUE(Validity{}.contains(1e-300));
}

TEST(RateFunction, HugeRatesStayRepresentable) {
  const auto rate = from_log([](double log_s) { return std::exp(-log_s); });
  EXPECT_NEAR(rate.log_value(1e-4), 1e4, 1e-8);
  EXPECT_EQ(rate.value(1e-4), kInf);
}

TEST(RateFunction, TableIsPiecewiseConstantUpperBound) {
  const auto rate = RateFunction::from_table({0.1, 0.5, 1.0}, {3.0, 2.0, 1.0}, Validity{0.0, 1.0});
  EXPECT_EQ(rate.log_value(0.05), kInf);
  EXPECT_EQ(rate.log_value(0.1), 3.0);
  EXPECT_EQ(rate.log_value(0.3), 3.0);
  EXPECT_EQ(rate.log_value(0.7), 2.0);
  EXPECT_EQ(rate.log_value(1.0), 1.0);
}

TEST(RateFunction, ProbeGrid) {
  const auto bounded = probe_grid(Validity{0.0, 2.0});
  ASSERT_EQ(bounded.size(), 40u);
  EXPECT_DOUBLE_EQ(bounded.front(), 2e-4);
  EXPECT_DOUBLE_EQ(bounded.back(), 2.0);
  const auto open = probe_grid(Validity{});
  EXPECT_DOUBLE_EQ(open.front(), 1e-4);
  EXPECT_DOUBLE_EQ(open.back(), 1e2);
}

TEST(RateFunction, Monotonicity) {
  const auto decreasing = from_log([](double log_s) { return -log_s; });
  const auto bump = from_log([](double log_s) { return std::sin(3.0 * log_s); });
  const auto grid = logspace(1e-3, 10.0, 50);
  EXPECT_TRUE(is_non_increasing(decreasing, grid));
  EXPECT_FALSE(is_non_increasing(bump, grid));
}

TEST(RateFunction, FitsPolynomialClass) {
  const auto rate = from_log([](double log_s) { return std::log(3.0) - 0.5 * log_s; });
  const ClassTag tag = fit_class_small_s(rate);
  EXPECT_EQ(tag.kind, RateClass::polynomial);
  EXPECT_NEAR(tag.exponent, 0.5, 1e-9);
  EXPECT_NEAR(tag.c, 3.0, 1e-9);
}

TEST(RateFunction, FitsExponentialClass) {
  const auto rate = from_log([](double log_s) { return 1.0 + 2.0 * std::exp(-log_s); });
  const ClassTag tag = fit_class_small_s(rate);
  EXPECT_EQ(tag.kind, RateClass::exponential);
  EXPECT_NEAR(tag.exponent, 1.0, 0.05);
  EXPECT_NEAR(tag.c, 2.0, 0.1);
}

TEST(RateFunction, FitsDoublyExponentialClass) {
  const auto rate = from_log([](double log_s) { return std::exp(std::exp(-log_s)); });
  EXPECT_EQ(fit_class(rate, 0.2, 2.0).kind, RateClass::doubly_exponential);
}

TEST(RateFunction, OscillatingRateIsTabulated) {
  const auto rate = from_log([](double log_s) { return 5.0 + std::sin(4.0 * log_s); });
  EXPECT_EQ(fit_class(rate, 1e-4, 1e-2).kind, RateClass::tabulated);
}

TEST(RateFunction, JsonRoundTrip) {
  for (const ClassTag& tag : {ClassTag::polynomial(0.5, 2.0), ClassTag::exponential(1.0, 0.25),
                              ClassTag::doubly_exponential(), ClassTag::tabulated()}) {
    const nlohmann::json j = tag;
    EXPECT_EQ(j.get<ClassTag>(), tag);
  }
  const Validity v{0.0, kInf};
  const nlohmann::json j = v;
  EXPECT_EQ(j.get<Validity>(), v);
}
