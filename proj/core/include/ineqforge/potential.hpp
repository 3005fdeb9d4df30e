#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ineqforge {

enum class PotentialFamily { gaussian, power, double_well, sum };

/// A potential V on R^n from a closed family. Every family is radial:
///   gaussian(c)          V = c|x|^2
///   power(c, b)          V = c|x|^b,   b > 1
///   double_well(a4, a2)  V = a4|x|^4 - a2|x|^2
///   sum(terms)           V = sum of the terms (same dimension)
/// plus an additive offset. An empty sum is the flat potential V = offset;
/// it is accepted by pointwise evaluators but rejected wherever e^{-V} must
/// be integrable.
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::gaussian;
  int dimension = 1;
  double offset = 0.0;
  double c = 0.0;
  double b_pow = 0.0;
  double a4 = 0.0;
  double a2 = 0.0;
  std::vector<PotentialSpec> terms;

  static PotentialSpec gaussian(double c, int n = 1);
  static PotentialSpec power(double c, double b_pow, int n = 1);
  static PotentialSpec double_well(double a4, double a2, int n = 1);
  static PotentialSpec sum(std::vector<PotentialSpec> terms, int n = 1);
  static PotentialSpec flat(double level, int n = 1);

  [[nodiscard]] PotentialSpec with_offset(double value) const;

  /// Throws Error(invalid_argument) when a family constraint is violated.
  void validate() const;

  [[nodiscard]] bool is_flat() const;
  /// True when the radial profile is non-decreasing in |x| (gaussian, power
  /// and sums of those).
  [[nodiscard]] bool is_monotone_radial() const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

/// One radial term coef * rho^degree.
struct Monomial {
  double coef = 0.0;
  double degree = 0.0;
};

/// Offset-free expansion of V as a sum of radial monomials.
std::vector<Monomial> monomials(const PotentialSpec& spec);

/// Radial profile f(rho) and its derivatives. `tangential` is f'(rho)/rho,
/// the Hessian eigenvalue on directions orthogonal to x; all quantities are
/// the exact limits at rho = 0 (possibly infinite for power b < 2).
struct RadialJet {
  double f = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double tangential = 0.0;
  double tangential_d1 = 0.0;

  [[nodiscard]] double laplacian(int n) const;
  [[nodiscard]] double hess_min_eig(int n) const;
};

RadialJet radial_jet(const PotentialSpec& spec, double rho);

struct EvalResult {
  double v = 0.0;
  std::vector<double> grad;
  double hess_min_eig = 0.0;
};

EvalResult eval(const PotentialSpec& spec, std::span<const double> x);

/// Z = integral of e^{-V} over [-L, L]^n by the composite trapezoid rule with
/// m nodes per axis (n <= 2). Throws TailMassTooLarge when the analytic tail
/// envelope beyond L - 1 exceeds 1e-10 Z.
double normalizing_constant(const PotentialSpec& spec, double L, int m);

/// Upper bound on the mass of e^{-V} outside the ball of radius R, from the
/// lower growth envelope.
double tail_mass_bound(const PotentialSpec& spec, double R);

/// Checks the truncation used by the quadrature and the discrete model.
void check_tail_mass(const PotentialSpec& spec, double L, double Z);

/// Lower bound on the smallest Hessian eigenvalue over [-R, R]^n. Exact for
/// gaussian and power; grid infimum minus a Lipschitz margin otherwise.
double curvature_lower_bound(const PotentialSpec& spec, double R);

/// Lower bound on the smallest Hessian eigenvalue over all of R^n.
double global_curvature_lower_bound(const PotentialSpec& spec);

/// V(x) - offset >= coef |x|^power - shift for all x.
struct GrowthEnvelope {
  double coef = 0.0;
  double power = 0.0;
  double shift = 0.0;
};

GrowthEnvelope lower_growth_envelope(const PotentialSpec& spec);
/// Same envelope for an arbitrary monomial sum; throws NonIntegrable when the
/// sum does not grow to +infinity.
GrowthEnvelope lower_growth_envelope(std::span<const Monomial> terms);
/// V(x) - offset <= coef |x|^power + shift for all x.
GrowthEnvelope upper_growth_envelope(const PotentialSpec& spec);

/// sup of |grad V| over the ball of radius rho.
double gradient_bound(const PotentialSpec& spec, double rho);
/// sup of the Hessian spectral norm over the shell rho_lo <= |x| <= rho_hi.
double hessian_bound(const PotentialSpec& spec, double rho_lo, double rho_hi);
/// Radius beyond which the radial profile is strictly increasing.
double monotone_radius(const PotentialSpec& spec);
double monotone_radius(std::span<const Monomial> terms);

/// Radial profile sum of coef * rho^degree (no offset), with the rho = 0
/// limits used by radial_jet.
double eval_monomials(std::span<const Monomial> terms, double rho);
double eval_monomials_d1(std::span<const Monomial> terms, double rho);

/// Radii bracketing the level set {V = u}: every x with V(x) = u satisfies
/// lo <= |x| <= hi.
struct ShellBracket {
  double lo = 0.0;
  double hi = 0.0;
};
ShellBracket level_shell(const PotentialSpec& spec, double u);

/// Leading asymptotic term coef * rho^degree of a radial quantity.
struct LeadingTerm {
  double coef = 0.0;
  double degree = 0.0;
};

LeadingTerm leading_term(std::span<const Monomial> terms);
LeadingTerm leading_potential(const PotentialSpec& spec);
LeadingTerm leading_gradient(const PotentialSpec& spec);
LeadingTerm leading_laplacian(const PotentialSpec& spec);

void to_json(nlohmann::json& j, const PotentialSpec& spec);
void from_json(const nlohmann::json& j, PotentialSpec& spec);

}  // namespace ineqforge
