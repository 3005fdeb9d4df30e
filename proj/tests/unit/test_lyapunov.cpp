#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/lyapunov.hpp"
#include "ineqforge/numeric.hpp"

using namespace ineqforge;

TEST(Lyapunov, DriftRatioForGaussian) {
  const auto spec = PotentialSpec::gaussian(0.5);
  const auto w = WitnessParams::exp_aV(0.5);
  const std::vector<double> origin = {0.0}, two = {2.0};
  // LW/W = a dV - a(1-a)|grad V|^2 = 0.5 - 0.25 x^2.
  EXPECT_DOUBLE_EQ(drift_ratio(spec, w, origin), 0.5);
  EXPECT_DOUBLE_EQ(drift_ratio(spec, w, two), -0.5);
}

TEST(Lyapunov, ConstantWitnessHasZeroDrift) {
  const auto spec = PotentialSpec::double_well(1.0, 1.0);
  const WitnessParams w{WitnessFamily::exp_aV, 0.0, 2.0};
  for (double x : {0.0, 0.5, 1.7, 3.0}) {
    const std::vector<double> p = {x};
    EXPECT_EQ(drift_ratio(spec, w, p), 0.0);
  }
}

TEST(Lyapunov, DistanceWitnessIsSingularAtOriginForSmallExponent) {
  const auto spec = PotentialSpec::gaussian(0.5);
  const auto w = WitnessParams::exp_dist(0.5, 1.5);
  const std::vector<double> origin = {0.0};
  try {
    (void)drift_ratio(spec, w, origin);
    FAIL() << "expected SingularOrigin";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_origin);
  }
}

TEST(Lyapunov, DriftDecreasesWithGradientAtFixedLaplacian) {
  // For a 1-D Gaussian the Laplacian is constant while |grad V| grows with |x|.
  const auto spec = PotentialSpec::gaussian(0.5);
  const auto w = WitnessParams::exp_aV(0.25);
  double prev = kInf;
  for (double x : linspace(0.0, 5.0, 51)) {
    const double d = drift_ratio_radial(spec, w, x);
    EXPECT_LE(d, prev);
    prev = d;
  }
}

TEST(Lyapunov, GaussianWitness) {
  const auto spec = PotentialSpec::gaussian(0.5);
  const LyapunovWitness w = fit_witness(spec, WitnessParams::exp_aV(0.5));
  EXPECT_EQ(w.phi.form, PhiForm::radius_power);
  EXPECT_DOUBLE_EQ(w.phi.exponent, 2.0);
  EXPECT_NEAR(w.phi.coef, 0.125, 1e-12);
  EXPECT_DOUBLE_EQ(w.r0, 2.0);
  // Exact constant is 1/2; the fitted value is padded upward.
  EXPECT_GE(w.b_const, 0.5);
  EXPECT_LE(w.b_const, 0.51);
  EXPECT_TRUE(w.certificate_grade());
  EXPECT_EQ(w.grade(), "certificate");
}

TEST(Lyapunov, WitnessSurvivesRefinedGrid) {
  for (const auto& spec : {PotentialSpec::gaussian(0.5), PotentialSpec::power(1.0, 4.0),
                           PotentialSpec::double_well(1.0, 1.0)}) {
    const LyapunovWitness w = fit_witness(spec, WitnessParams::exp_aV(0.5));
    const auto& dom = w.validated_on;
    const DriftReport fine = validate_witness(spec, w, dom.radius, 2 * dom.points - 1);
    EXPECT_TRUE(fine.passed(1e-9)) << spec.describe() << " violation " << fine.max_violation;
  }
}

TEST(Lyapunov, QuarticWitnessGrowsFasterThanQuadratic) {
  const auto spec = PotentialSpec::power(1.0, 4.0);
  const LyapunovWitness w = fit_witness(spec, WitnessParams::exp_aV(0.5));
  EXPECT_GT(w.phi.at_radius(spec, 10.0) / w.phi.at_radius(spec, 5.0), 4.0);
}

TEST(Lyapunov, NoWitnessWhenDriftIsPositiveAtInfinity) {
  // |x|^1.5 cannot absorb the growth of a Gaussian-type witness.
  const auto spec = PotentialSpec::power(1.0, 1.5);
  try {
    (void)fit_witness(spec, WitnessParams::exp_dist(0.5, 2.0));
    FAIL() << "expected NoWitnessFound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_witness_found);
  }
}

TEST(Lyapunov, FitIsDeterministic) {
  const auto spec = PotentialSpec::double_well(1.0, 1.0);
  EXPECT_EQ(fit_witness(spec, WitnessParams::exp_aV(0.5)),
            fit_witness(spec, WitnessParams::exp_aV(0.5)));
}

TEST(Lyapunov, CurvatureGrowthCondition) {
  EXPECT_TRUE(check_curvature_growth(PotentialSpec::gaussian(0.5), 1.0, 6.0)
                  .passed(kCurvatureGrowthTolerance));
  const DriftReport quartic = check_curvature_growth(PotentialSpec::power(1.0, 4.0), 0.0, 6.0);
  EXPECT_TRUE(quartic.passed(kCurvatureGrowthTolerance));
  EXPECT_TRUE(check_curvature_growth(PotentialSpec::double_well(1.0, 1.0), -2.0, 4.0)
                  .passed(kCurvatureGrowthTolerance));
  // A curvature constant that is too optimistic must be caught.
  EXPECT_FALSE(check_curvature_growth(PotentialSpec::gaussian(0.5), 1.5, 6.0)
                   .passed(kCurvatureGrowthTolerance));
}

TEST(Lyapunov, BoundedPhiIsPoincareOnly) {
  LyapunovWitness w;
  w.phi = PhiShape::radius_power(1.0, 0.0);
  EXPECT_FALSE(w.certificate_grade());
  EXPECT_EQ(w.grade(), "poincare_only");
}

TEST(Lyapunov, JsonRoundTrip) {
  const LyapunovWitness w = fit_witness(PotentialSpec::gaussian(0.5), WitnessParams::exp_aV(0.5));
  const nlohmann::json j = w;
  EXPECT_EQ(j.get<LyapunovWitness>(), w);
}
