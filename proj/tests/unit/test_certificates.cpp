#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "ineqforge/baseline.hpp"
#include "ineqforge/certificates.hpp"
#include "ineqforge/errors.hpp"
#include "ineqforge/json_io.hpp"
#include "ineqforge/numeric.hpp"

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

struct GaussianSetup {
  PotentialSpec spec = PotentialSpec::gaussian(0.5);
  LyapunovWitness witness = fit_witness(spec, WitnessParams::exp_aV(0.5));
  GeometryProfile profile = make_profile(spec, witness, SetFamily::balls());
};

const GaussianSetup& gaussian() {
  static const GaussianSetup setup;
  return setup;
}

// Closed forms for V = x^2 / 2 with phi = x^2 / 8 over balls:
// Phi(r) = r^2 / 8, and over B(0, r + 2): g = H = (r + 2)^2 / 2, G = (r + 2)^2.
double phi_inv(double y) { return std::sqrt(8.0 * y); }
double g_exact(double r) { return 0.5 * (r + 2.0) * (r + 2.0); }
double G_exact(double r) { return (r + 2.0) * (r + 2.0); }

double route_one_by_hand(double b, double s, std::span<const double> eps_grid) {
  double best = kInf;
  for (double eps : eps_grid) {
    const double r = std::max(2.0, phi_inv(std::max(4.0 * b / eps, 4.0 / (s * eps))));
    const double arg = std::min({eps * s / 10.0, eps / 16.0, 2.0 * (1.0 - eps) / G_exact(r)});
    best = std::min(best, 5.0 / (2.0 * eps) * lebesgue_beta(1, arg) * std::exp(g_exact(r)));
  }
  return best;
}

GeometryProfile stub(std::function<double(double)> phi, std::function<double(double)> h) {
  GeometryProfile p;
  p.phi_of_r = std::move(phi);
  p.g_of_r = h;
  p.G_of_r = h;
  p.H_of_r = h;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Certificates, RouteOneSingletonEps) {
  const auto& g = gaussian();
  const std::vector<double> eps = {0.5};
  const double s = 0.5;
  const double got = alpha_route_one(BaselineBeta::lebesgue(1), g.profile, g.witness.b_const, eps, s);
  EXPECT_LT(rel(got, route_one_by_hand(g.witness.b_const, s, eps)), 1e-9);
}

TEST(Certificates, RouteOneMatchesHandEvaluationForGaussian) {
  const auto& g = gaussian();
  const auto eps = linspace(0.1, 0.9, 9);
  const double got = alpha_route_one(BaselineBeta::lebesgue(1), g.profile, g.witness.b_const, eps, 1.0);
  EXPECT_LT(rel(got, route_one_by_hand(g.witness.b_const, 1.0, eps)), 1e-9);
}

TEST(Certificates, RouteTwoMatchesHandEvaluationForGaussian) {
  const auto& g = gaussian();
  const double s = 1.0;
  const double r = std::max(2.0, phi_inv(std::max(4.0 / s, g.witness.b_const * s / 2.0)));
  const double H = g_exact(r);
  const double expected_log =
      std::log(2.0) + 2.0 * H + lebesgue_log_beta(1, s / 8.0 * std::exp(-H));
  const double got = log_alpha_route_two(log_rate_of(BaselineBeta::lebesgue(1)), g.profile,
                                         g.witness.b_const, g.witness.r0, s);
  EXPECT_NEAR(got, expected_log, 1e-9 * std::abs(expected_log));
}

TEST(Certificates, RouteTwoWithoutOscillation) {
  const GeometryProfile p = stub([](double r) { return r; }, [](double) { return 0.0; });
  for (double s : {0.01, 0.3, 1.0}) {
    const double got = alpha_route_two(BaselineBeta::lebesgue(1), p, 0.5, 0.0, s);
    EXPECT_LT(rel(got, 2.0 * lebesgue_beta(1, s / 8.0)), 1e-12);
  }
}

TEST(Certificates, RouteTwoIsNonIncreasing) {
  const auto& g = gaussian();
  double prev = kInf;
  for (double s : logspace(0.05, 3.0, 20)) {
    const double a = alpha_route_two(BaselineBeta::lebesgue(1), g.profile, g.witness.b_const,
                                      g.witness.r0, s);
    EXPECT_LE(a, prev * (1.0 + 1e-12));
    prev = a;
  }
}

TEST(Certificates, LargerBaselineGivesLargerRates) {
  const auto& g = gaussian();
  const auto leb = BaselineBeta::lebesgue(1);
  const auto bord = BaselineBeta::bord(1, 1.0, 1.0);
  const auto eps = default_eps_grid();
  for (double s : logspace(0.05, 3.0, 10)) {
    EXPECT_LE(alpha_route_two(leb, g.profile, g.witness.b_const, g.witness.r0, s),
              alpha_route_two(bord, g.profile, g.witness.b_const, g.witness.r0, s));
    EXPECT_LE(alpha_route_one(leb, g.profile, g.witness.b_const, eps, s),
              alpha_route_one(bord, g.profile, g.witness.b_const, eps, s));
  }
}

TEST(Certificates, GeneralRouteChaining) {
  GeometryProfile p = stub([](double r) { return r / 2.0; }, [](double) { return 0.0; });
  p.r_min = 1.0;
  auto local = [](double r, double s) { return std::exp(r) / std::sqrt(s); };
  const double plain = alpha_general(local, p, 0.0, 1.0, false);
  EXPECT_LT(rel(plain, std::exp(4.0) * std::sqrt(2.0)), 1e-12);
  EXPECT_LT(rel(alpha_general(local, p, 0.0, 1.0, true), plain), 1e-12);
  EXPECT_GE(alpha_general(local, p, 0.3, 1.0, true), alpha_general(local, p, 0.3, 1.0, false));
  // k = 1 + 0.3 / Phi(r_min) = 1.6 multiplies the rate and shrinks the local scale.
  const double k = 1.6;
  EXPECT_LT(rel(alpha_general(local, p, 0.3, 1.0, true), k * std::exp(4.0) * std::sqrt(2.0 * k)), 1e-12);
}

TEST(Certificates, EtaInverse) {
  auto eta = [](double u) { return u * u; };
  EXPECT_NEAR(eta_inverse(eta, 4.0), 2.0, 1e-12);
  EXPECT_EQ(eta_inverse(eta, 0.0), 0.0);
}

TEST(Certificates, LogDensityRates) {
  auto eta = [](double u) { return u; };
  auto one = [](double) { return 1.0; };
  EXPECT_LT(rel(beta_logdensity(1, eta, one, 1, 1.0, 1.0, 1.0), 1.0 + std::numbers::e), 1e-12);
  EXPECT_LT(rel(beta_logdensity(2, eta, one, 1, 1.0, 1.0, 1.0), 1.0 + std::exp(2.5)), 1e-12);
}

TEST(Certificates, LogDensityWithExponentialGammaIsExponentialClass) {
  auto eta = [](double u) { return u; };
  auto gamma = [](double u) { return std::exp(0.01 * u); };
  RateFunction rate(
      [=](double log_s) {
        return log_beta_logdensity(1, eta, gamma, 1, 1.0, 1.0, std::exp(log_s));
      },
      ClassTag::tabulated(), {}, Validity{0.0, 1.0});
  const ClassTag tag = fit_class_small_s(rate);
  EXPECT_EQ(tag.kind, RateClass::exponential);
  EXPECT_NEAR(tag.exponent, 1.0, 0.05);
}

TEST(Certificates, DistanceExponents) {
  EXPECT_DOUBLE_EQ(distance_exponent(3, 2.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(distance_exponent(1, 2.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(distance_exponent(1, 1.5, 1.5), 1.5);
  EXPECT_GT(distance_exponent(2, 1.5, 1.5), 0.0);
}

TEST(Certificates, DistanceRateNeedsCheckedPremises) {
  const auto names = distance_premises(3);
  std::vector<Assumption> checked;
  for (const auto& n : names) checked.push_back({n, "", true});
  EXPECT_LT(rel(beta_distance(3, 2.0, 2.0, 1.0, 2.0, 0.5, checked), 2.0 * std::exp(2.0)), 1e-12);

  std::vector<Assumption> missing(checked.begin(), checked.end() - 1);
  EXPECT_EQ(code_of([&] { (void)beta_distance(3, 2.0, 2.0, 1.0, 1.0, 0.5, missing); }),
            ErrorCode::case_premise_unchecked);
  auto unchecked = checked;
  unchecked.front().checked = false;
  EXPECT_EQ(code_of([&] { (void)beta_distance(3, 2.0, 2.0, 1.0, 1.0, 0.5, unchecked); }),
            ErrorCode::case_premise_unchecked);
}

TEST(Certificates, RouteCertificatesAreNonIncreasing) {
  const auto& g = gaussian();
  for (Route route : {Route::main1, Route::main2, Route::levelset, Route::general}) {
    const Certificate cert = certify_route(g.spec, g.witness, route);
    EXPECT_EQ(cert.kind, CertificateKind::SPI);
    EXPECT_TRUE(is_non_increasing(cert.rate, cert.table.s)) << to_string(route);
    EXPECT_TRUE(std::is_sorted(cert.table.log_beta.rbegin(), cert.table.log_beta.rend(),
                               [](double a, double b) { return a < b; }))
        << to_string(route);
  }
}

TEST(Certificates, RouteTwoTagIsStableUnderRefit) {
  const auto& g = gaussian();
  const Certificate cert = certify_route(g.spec, g.witness, Route::main2);
  ASSERT_EQ(cert.rate.class_tag().kind, RateClass::exponential);
  const double s_max = cert.rate.validity().s_max;
  const ClassTag deeper = fit_class(cert.rate, 1e-6 * s_max, 1e-4 * s_max);
  ASSERT_EQ(deeper.kind, RateClass::exponential);
  EXPECT_NEAR(deeper.exponent, cert.rate.class_tag().exponent,
              0.05 * cert.rate.class_tag().exponent);
}

TEST(Certificates, RouteCertificateRecordsAssumptions) {
  const auto& g = gaussian();
  const Certificate cert = certify_route(g.spec, g.witness, Route::main2);
  const Assumption* w = cert.find_assumption("lyapunov_witness");
  ASSERT_NE(w, nullptr);
  EXPECT_TRUE(w->checked);
  EXPECT_TRUE(cert.normalized());
  EXPECT_FALSE(cert.inputs.empty());
}

TEST(Certificates, BoundedPhiIsRejected) {
  const auto& g = gaussian();
  LyapunovWitness bounded = g.witness;
  bounded.phi = PhiShape::radius_power(1.0, 0.0);
  EXPECT_EQ(code_of([&] { (void)certify_route(g.spec, bounded, Route::main2); }),
            ErrorCode::invalid_argument);
}

TEST(Certificates, LogDensityPremisesAreEnforced) {
  LogDensityOptions o;
  o.eta_coef = 1.0;
  o.eta_power = 1.0;
  EXPECT_EQ(code_of([&] { (void)certify_logdensity(PotentialSpec::gaussian(0.5), o); }),
            ErrorCode::case_premise_unchecked);
  o.eta_power = 1.5;
  const Certificate cert = certify_logdensity(PotentialSpec::power(1.0, 4.0), o);
  EXPECT_FALSE(cert.normalized());
  EXPECT_TRUE(is_non_increasing(cert.rate, cert.table.s));
}

TEST(Certificates, ClassifyExponentialRateAsDefectiveLogSobolev) {
  RateFunction rate([](double log_s) { return std::log(2.0) + 3.0 * std::exp(-log_s); },
                    ClassTag::exponential(1.0, 3.0), {}, Validity{0.0, 1.0});
  const Certificate cert = classify(make_certificate(rate, "test"));
  EXPECT_EQ(cert.kind, CertificateKind::DLSI);
}

TEST(Certificates, ClassifyPolynomialRateAsNashType) {
  RateFunction rate([](double log_s) { return -0.5 * log_s; }, ClassTag::polynomial(0.5, 1.0), {},
                    Validity{0.0, 1.0});
  const Certificate cert = classify(make_certificate(rate, "test"));
  EXPECT_EQ(cert.kind, CertificateKind::SPI);
  EXPECT_TRUE(cert.nash_type);
}

TEST(Certificates, DistanceCertificateClassification) {
  const Certificate gauss = classify(certify_distance(PotentialSpec::gaussian(0.5)));
  EXPECT_EQ(gauss.kind, CertificateKind::DLSI);

  const Certificate heavy = classify(certify_distance(PotentialSpec::power(1.0, 1.5)));
  EXPECT_EQ(heavy.kind, CertificateKind::FSob);
  ASSERT_TRUE(heavy.fsob_exponent.has_value());
  EXPECT_DOUBLE_EQ(*heavy.fsob_exponent, 2.0 * (1.0 - 1.0 / 1.5));
}

TEST(Certificates, JsonRoundTripIsBitIdentical) {
  const auto& g = gaussian();
  for (const Certificate& cert :
       {certify_route(g.spec, g.witness, Route::main2), classify(certify_distance(g.spec))}) {
    const nlohmann::json j = certificate_to_json(cert);
    const Certificate back = certificate_from_json(j);
    EXPECT_EQ(canonical_dump(certificate_to_json(back)), canonical_dump(j));
    EXPECT_EQ(back.id(), cert.id());
    for (double s : {1e-3, 0.1, 0.9}) EXPECT_EQ(back.rate.log_value(s), cert.rate.log_value(s));
  }
}

TEST(Certificates, RouteNames) {
  EXPECT_EQ(parse_route("main2"), Route::main2);
  EXPECT_EQ(to_string(Route::levelset), "levelset");
  EXPECT_EQ(code_of([] { (void)parse_route("main3"); }), ErrorCode::invalid_argument);
}
