#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ineqforge/rate_function.hpp"

namespace ineqforge {

/// Window for the supremum over u in xi. The grid is log-spaced; when the
/// argmax sits on an edge the window grows geometrically towards
/// [min_lo, max_hi] before giving up.
struct XiWindow {
  double lo = 1e-6;
  double hi = 1e6;
  std::size_t points = 241;
  double min_lo = 1e-150;
  double max_hi = 1e150;
};

/// xi(t) = sup_{u>0} (1/u - beta(u) / (u t)). Returns 0 when every value is
/// non-positive and +inf when the values keep increasing at the lower edge of
/// the widest window.
double xi_from_beta(const RateFunction& beta, double t, const XiWindow& window = {});

/// F(u) = (C1/u) int_0^u xi(t/2) dt - C2. Throws XiDiverges when xi is +inf
/// anywhere in the integration range.
double fsob_from_beta(const RateFunction& beta, double C1, double C2, double u);

/// A defective F-Sobolev inequality: F non-decreasing on [u_star, inf).
struct FSobDescriptor {
  std::function<double(double)> F;
  double c1 = 1.0;
  double c2 = 1.0;
  double u_star = 1.0;
  std::optional<double> exponent;  // F(u) ~ log^exponent(u) when known

  /// Smallest v >= u_star with F(v) >= y. Throws NotInvertible when y lies
  /// below F(u_star); +inf when y is never reached.
  [[nodiscard]] double inverse(double y) const;
};

/// Wraps fsob_from_beta into a descriptor. u_star is the first node of a
/// log grid on [1e-3, 1e6] from which F is positive and non-decreasing.
FSobDescriptor fsob_descriptor(const RateFunction& beta, double C1 = 1.0, double C2 = 1.0);

/// beta(u) = C1 F^{-1}(C2 (1 + 1/u)).
double beta_from_fsob(const FSobDescriptor& fsob, double C1, double C2, double u);

struct DlsiFit {
  bool is_dlsi = false;
  double c = 0.0;
  double c_prime = 0.0;
  double residual = 0.0;    // max residual of the log fit over the spread of log beta
  bool degenerate = false;  // flat input; c_prime is reported as fitted
};

inline constexpr double kDlsiResidualThreshold = 0.05;

/// Least-squares fit of log beta = log c + c'/u. Needs at least 8 samples
/// spanning two decades of u.
DlsiFit detect_dlsi(std::span<const std::pair<double, double>> samples,
                    double threshold = kDlsiResidualThreshold);

/// LSI constant C_LS + (D_LS + 2) C_P obtained from a defective inequality
/// and a Poincare constant.
double rothaus_tighten(double c_ls, double d_ls, double c_p);

/// "u,F" rows with 17 significant digits.
std::string fsob_csv(const FSobDescriptor& fsob, std::span<const double> u_grid);

void to_json(nlohmann::json& j, const DlsiFit& fit);

}  // namespace ineqforge
