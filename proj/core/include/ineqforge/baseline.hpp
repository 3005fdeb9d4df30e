#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ineqforge/potential.hpp"

namespace ineqforge {

/// Rate of the super-Poincare inequality for Lebesgue measure on R^n:
/// (4 pi s)^{-n/2}.
double lebesgue_beta(int n, double s);
double lebesgue_log_beta(int n, double s);

/// Nash constant 2 (1 + 2/n) (1 + n/2)^{2/n} (8 pi)^{-n/4}.
double nash_constant(int n);

/// Result of minimizing s -> s E + lebesgue_beta(n, s) M^2 over s > 0.
struct NashOptimum {
  double s = 0.0;
  double bound = 0.0;     // minimal value, an upper bound on ||f||_2^2
  double constant = 0.0;  // bound^{1 + 2/n} / (E M^{4/n})
};

/// Numerical optimization (golden section in log s); `constant` is the Nash
/// constant this rate implies, independent of (E, M) by homogeneity.
NashOptimum nash_from_spi(int n, double energy, double l1_norm);

/// Upper bound on the Neumann heat kernel of an interval of length r at time
/// t. The image series stops once the next term falls below tol times the
/// partial sum.
double neumann_kernel_sup(double interval_length, double t, double tol = 1e-17);

/// C theta^n (1 + s^{-n/2}).
double bord_beta(int n, double theta, double s, double C = 1.0);
double bord_log_beta(int n, double theta, double s, double C = 1.0);

/// Largest Hessian entry on the level set {V = r}, bounded through the
/// spectral norm over the radial shell bracketing it.
double level_set_hessian_bound(const PotentialSpec& spec, double r);

enum class BaselineForm { lebesgue, bord };

struct BaselineBeta {
  BaselineForm form = BaselineForm::lebesgue;
  int n = 1;
  double theta = 1.0;
  double C = 1.0;
  bool unnormalized = false;

  static BaselineBeta lebesgue(int n) { return {BaselineForm::lebesgue, n, 1.0, 1.0, false}; }
  /// C left at its default 1 marks the constant as unnormalized.
  static BaselineBeta bord(int n, double theta, double C = 1.0, bool unnormalized = true) {
    return {BaselineForm::bord, n, theta, C, unnormalized};
  }

  void validate() const;
  [[nodiscard]] double operator()(double s) const;
  [[nodiscard]] double log_value(double s) const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const BaselineBeta&, const BaselineBeta&) = default;
};

void to_json(nlohmann::json& j, const BaselineBeta& base);
void from_json(const nlohmann::json& j, BaselineBeta& base);

}  // namespace ineqforge
