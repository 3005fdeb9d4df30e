#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ineqforge/potential.hpp"

namespace ineqforge {

/// Lyapunov function families: W = exp(a V) and W = exp(a |x|^b_exp).
enum class WitnessFamily { exp_aV, exp_dist };

struct WitnessParams {
  WitnessFamily family = WitnessFamily::exp_aV;
  double a = 0.5;
  double b_exp = 2.0;

  static WitnessParams exp_aV(double a) { return {WitnessFamily::exp_aV, a, 2.0}; }
  static WitnessParams exp_dist(double a, double b_exp) {
    return {WitnessFamily::exp_dist, a, b_exp};
  }

  /// 0 < a < 1 for exp_aV; a > 0 and b_exp > 1 for exp_dist. The value
  /// a = 0 is accepted as a test hook (constant W).
  void validate() const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const WitnessParams&, const WitnessParams&) = default;
};

/// Symbolic shape of the drift lower bound: coef * |x|^exponent or
/// coef * V(x)^exponent. Both shapes are non-decreasing in |x| whenever they
/// are admissible, which lets the geometry module compute exact infima.
enum class PhiForm { radius_power, potential_power };

struct PhiShape {
  PhiForm form = PhiForm::radius_power;
  double coef = 1.0;
  double exponent = 2.0;

  static PhiShape radius_power(double coef, double exponent) {
    return {PhiForm::radius_power, coef, exponent};
  }
  static PhiShape potential_power(double coef, double exponent) {
    return {PhiForm::potential_power, coef, exponent};
  }

  /// Value at radius rho for the given potential.
  [[nodiscard]] double at_radius(const PotentialSpec& spec, double rho) const;
  [[nodiscard]] double derivative_at_radius(const PotentialSpec& spec, double rho) const;
  /// True when the shape is usable with this potential (V-powers need V >= 0
  /// with a non-decreasing radial profile).
  [[nodiscard]] bool admissible_for(const PotentialSpec& spec) const;
  [[nodiscard]] bool unbounded() const { return exponent > 0.0; }
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const PhiShape&, const PhiShape&) = default;
};

/// Radial validation grid: nodes on [0, radius] with the given spacing.
struct ValidationDomain {
  double radius = 0.0;
  double step = 0.0;
  std::size_t points = 0;

  friend bool operator==(const ValidationDomain&, const ValidationDomain&) = default;
};

struct LyapunovWitness {
  WitnessParams params;
  PhiShape phi;
  double phi0 = 0.0;
  double b_const = 0.0;
  double r0 = 0.0;
  ValidationDomain validated_on;

  /// "certificate" when phi grows to infinity, "poincare_only" otherwise.
  [[nodiscard]] std::string grade() const;
  [[nodiscard]] bool certificate_grade() const { return phi.unbounded(); }

  friend bool operator==(const LyapunovWitness&, const LyapunovWitness&) = default;
};

struct DriftReport {
  double max_violation = 0.0;
  std::optional<LyapunovWitness> witness;
  ValidationDomain grid;

  [[nodiscard]] bool passed(double tolerance = 0.0) const { return max_violation <= tolerance; }
};

/// (L W / W)(x) for the generator L = Laplacian - grad V . grad.
double drift_ratio(const PotentialSpec& spec, const WitnessParams& params,
                   std::span<const double> x);
/// Same quantity on the radial profile; rho >= 0.
double drift_ratio_radial(const PotentialSpec& spec, const WitnessParams& params, double rho);
/// d/drho of drift_ratio_radial; used for grid margins.
double drift_ratio_radial_d1(const PotentialSpec& spec, const WitnessParams& params, double rho);
/// Monomial expansion of the radial drift ratio (exact, finite sum).
std::vector<Monomial> drift_monomials(const PotentialSpec& spec, const WitnessParams& params);

struct WitnessSearch {
  std::vector<double> r0_grid;           // empty: 0.25, 0.5, ..., 4
  std::vector<PhiShape> candidates;      // empty: derived from the drift's leading term
  std::size_t grid_points = 10000;       // size of the symmetric 1-D grid
  double radius_factor = 4.0;            // grid covers [0, radius_factor * max r0]

  [[nodiscard]] std::vector<double> radii() const;
};

/// Candidate shapes for phi derived from the leading term of -LW/W.
std::vector<PhiShape> default_phi_candidates(const PotentialSpec& spec,
                                             const WitnessParams& params);

/// First accepted witness, candidates in order and the smallest r0 for each.
/// Throws NoWitnessFound when nothing validates.
LyapunovWitness fit_witness(const PotentialSpec& spec, const WitnessParams& params,
                            const WitnessSearch& search = {});

/// Re-checks a witness on a radial grid of `points` nodes over [0, radius].
/// Reports the largest value of LW/W + phi - b_const 1_{|x| < r0}.
DriftReport validate_witness(const PotentialSpec& spec, const LyapunovWitness& witness,
                             double radius, std::size_t points);

/// Checks x . grad V >= V(x) - V(0) + c0 |x|^2 / 2 on a radial grid over
/// [0, radius]; max_violation is the largest RHS - LHS.
DriftReport check_curvature_growth(const PotentialSpec& spec, double c0, double radius,
                                   std::size_t points = 10001);

inline constexpr double kCurvatureGrowthTolerance = 1e-10;

void to_json(nlohmann::json& j, const WitnessParams& params);
void from_json(const nlohmann::json& j, WitnessParams& params);
void to_json(nlohmann::json& j, const PhiShape& phi);
void from_json(const nlohmann::json& j, PhiShape& phi);
void to_json(nlohmann::json& j, const LyapunovWitness& witness);
void from_json(const nlohmann::json& j, LyapunovWitness& witness);
void to_json(nlohmann::json& j, const DriftReport& report);

}  // namespace ineqforge
