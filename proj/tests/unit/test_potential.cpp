#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/potential.hpp"

using namespace ineqforge;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ineqforge::Error was thrown";
  return ErrorCode::invalid_argument;
}

std::vector<PotentialSpec> sample_specs(int n) {
  return {PotentialSpec::gaussian(0.5, n), PotentialSpec::gaussian(2.0, n),
          PotentialSpec::power(1.0, 4.0, n), PotentialSpec::power(0.7, 2.5, n),
          PotentialSpec::double_well(1.0, 1.0, n),
          PotentialSpec::sum({PotentialSpec::gaussian(0.5, n), PotentialSpec::power(0.1, 4.0, n)}, n)};
}

}  // namespace

TEST(Potential, GaussianEvaluation) {
  const std::vector<double> x = {2.0};
  const EvalResult r = eval(PotentialSpec::gaussian(0.5), x);
  EXPECT_DOUBLE_EQ(r.v, 2.0);
  ASSERT_EQ(r.grad.size(), 1u);
  EXPECT_DOUBLE_EQ(r.grad[0], 2.0);
  EXPECT_DOUBLE_EQ(r.hess_min_eig, 1.0);
}

TEST(Potential, PowerInTwoDimensions) {
  const std::vector<double> x = {1.0, 0.0};
  const EvalResult r = eval(PotentialSpec::power(1.0, 4.0, 2), x);
  EXPECT_DOUBLE_EQ(r.v, 1.0);
  EXPECT_DOUBLE_EQ(r.grad[0], 4.0);
  EXPECT_DOUBLE_EQ(r.grad[1], 0.0);
}

TEST(Potential, DoubleWellAtUnitRadius) {
  const std::vector<double> x = {1.0};
  const EvalResult r = eval(PotentialSpec::double_well(1.0, 1.0), x);
  EXPECT_DOUBLE_EQ(r.v, 0.0);
  EXPECT_DOUBLE_EQ(r.grad[0], 2.0);
}

TEST(Potential, NormalizingConstantsMatchClosedForms) {
  const double z_half = normalizing_constant(PotentialSpec::gaussian(0.5), 8.0, 4001);
  EXPECT_NEAR(z_half / std::sqrt(2.0 * std::numbers::pi), 1.0, 1e-8);
  const double z_one = normalizing_constant(PotentialSpec::gaussian(1.0), 8.0, 4001);
  EXPECT_NEAR(z_one / std::sqrt(std::numbers::pi), 1.0, 1e-8);
  const double z_2d = normalizing_constant(PotentialSpec::gaussian(0.5, 2), 8.0, 401);
  EXPECT_NEAR(z_2d / (2.0 * std::numbers::pi), 1.0, 1e-8);
}

TEST(Potential, OffsetScalesNormalizingConstant) {
  const auto spec = PotentialSpec::gaussian(0.5);
  const double z0 = normalizing_constant(spec, 8.0, 2001);
  const double z1 = normalizing_constant(spec.with_offset(1.0), 8.0, 2001);
  EXPECT_NEAR(z1 / z0, std::exp(-1.0), 1e-12);
  const double z2 = normalizing_constant(spec.with_offset(2.0), 8.0, 2001);
  EXPECT_LT(z2, z1);
}

TEST(Potential, TruncatedDomainIsRejected) {
  EXPECT_EQ(code_of([] { normalizing_constant(PotentialSpec::gaussian(0.5), 3.0, 2001); }),
            ErrorCode::tail_mass_too_large);
}

TEST(Potential, CurvatureLowerBounds) {
  EXPECT_DOUBLE_EQ(curvature_lower_bound(PotentialSpec::gaussian(0.5), 3.0), 1.0);
  const double dw = curvature_lower_bound(PotentialSpec::double_well(1.0, 1.0), 3.0);
  EXPECT_LE(dw, -2.0);
  EXPECT_GT(dw, -2.2);
  const double p4 = curvature_lower_bound(PotentialSpec::power(1.0, 4.0), 3.0);
  EXPECT_LE(p4, 0.0);
  EXPECT_GT(p4, -1e-9);
  EXPECT_DOUBLE_EQ(global_curvature_lower_bound(PotentialSpec::gaussian(2.0)), 4.0);
}

TEST(Potential, ValidationRejectsBadParameters) {
  EXPECT_EQ(code_of([] { PotentialSpec::gaussian(-1.0).validate(); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { PotentialSpec::power(1.0, 1.0).validate(); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { PotentialSpec::double_well(0.0, 1.0).validate(); }),
            ErrorCode::invalid_argument);
}

TEST(Potential, FlatPotentialIsNotIntegrable) {
  const auto flat = PotentialSpec::flat(3.0);
  const std::vector<double> x = {5.0};
  EXPECT_DOUBLE_EQ(eval(flat, x).v, 3.0);
  EXPECT_EQ(code_of([&] { normalizing_constant(flat, 8.0, 201); }), ErrorCode::non_integrable);
}

TEST(Potential, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int n : {1, 2}) {
    for (const auto& spec : sample_specs(n)) {
      for (int k = 0; k < 100; ++k) {
        std::vector<double> x(n);
        for (auto& xi : x) xi = coord(rng);
        const EvalResult r = eval(spec, x);
        for (int d = 0; d < n; ++d) {
          const double h = 1e-6;
          auto xp = x, xm = x;
          xp[d] += h;
          xm[d] -= h;
          const double fd = (eval(spec, xp).v - eval(spec, xm).v) / (2.0 * h);
          EXPECT_NEAR(r.grad[d], fd, 1e-6 * std::max(1.0, std::abs(fd))) << spec.describe();
        }
      }
    }
  }
}

TEST(Potential, RadialSymmetry) {
  for (const auto& spec : sample_specs(1)) {
    for (double t : {0.1, 0.7, 1.3, 2.9}) {
      const std::vector<double> a = {t}, b = {-t};
      EXPECT_DOUBLE_EQ(eval(spec, a).v, eval(spec, b).v);
    }
  }
  const auto spec = PotentialSpec::power(1.0, 3.0, 2);
  const std::vector<double> a = {0.6, 0.8}, b = {1.0, 0.0};
  EXPECT_NEAR(eval(spec, a).v, eval(spec, b).v, 1e-14);
}

TEST(Potential, LaplacianMatchesSecondDifferences) {
  const auto spec = PotentialSpec::double_well(1.0, 1.0);
  for (double rho : {0.3, 1.0, 2.2}) {
    const double h = 1e-4;
    const double fd = (radial_jet(spec, rho + h).f - 2.0 * radial_jet(spec, rho).f +
                       radial_jet(spec, rho - h).f) /
                      (h * h);
    EXPECT_NEAR(radial_jet(spec, rho).laplacian(1), fd, 1e-5);
  }
}

TEST(Potential, LevelShellBracketsLevelSet) {
  const auto spec = PotentialSpec::double_well(1.0, 1.0);
  const ShellBracket shell = level_shell(spec, 2.0);
  // V(rho) = 2 at rho^2 = 2.
  EXPECT_LE(shell.lo, std::sqrt(2.0) + 1e-12);
  EXPECT_GE(shell.hi, std::sqrt(2.0) - 1e-12);
}

TEST(Potential, TailMassBoundDominatesGaussianTail) {
  const auto spec = PotentialSpec::gaussian(0.5);
  const double exact = std::sqrt(2.0 * std::numbers::pi) * std::erfc(3.0 / std::sqrt(2.0));
  // The Gaussian envelope is tight, so the bound agrees to rounding.
  EXPECT_GE(tail_mass_bound(spec, 3.0), exact * (1.0 - 1e-12));
}

TEST(Potential, JsonRoundTrip) {
  const auto spec = PotentialSpec::sum(
      {PotentialSpec::gaussian(0.5), PotentialSpec::double_well(1.0, 0.5)}).with_offset(0.25);
  const nlohmann::json j = spec;
  EXPECT_EQ(j.get<PotentialSpec>(), spec);

  const auto parsed = nlohmann::json::parse(R"({"family":"gaussian","c":0.5,"n":1,"offset":0})")
                          .get<PotentialSpec>();
  EXPECT_EQ(parsed, PotentialSpec::gaussian(0.5));
  EXPECT_EQ(code_of([] { nlohmann::json::parse(R"({"family":"cubic"})").get<PotentialSpec>(); }),
            ErrorCode::parse_error);
}
