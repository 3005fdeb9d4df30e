#include "ineqforge/conversions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

// Decades by which the xi window moves when the argmax sits on an edge.
constexpr double kWindowShift = 1e12;
// Lower end of the quadrature in log t, relative to log u. The integrand is
// bounded by xi(u/2) * t there, so the dropped part is below e^-80 relative.
constexpr double kQuadratureDepth = 80.0;
constexpr unsigned kQuadratureMaxDepth = 15;
constexpr double kQuadratureTol = 1e-10;
constexpr int kInverseIterations = 64;

// (1/u)(1 - beta(u)/t) evaluated from log u.
double xi_objective(const RateFunction& beta, double log_t, double log_u) {
  const double ratio = std::exp(beta.log_value(std::exp(log_u)) - log_t);
  const double v = std::exp(-log_u) * (1.0 - ratio);
  return std::isnan(v) ? -kInf : v;
}

}  // namespace

double xi_from_beta(const RateFunction& beta, double t, const XiWindow& window) {
  require(t > 0.0, "xi_from_beta needs t > 0");
  require(window.lo > 0.0 && window.hi > window.lo && window.points >= 3,
          "xi window needs 0 < lo < hi and at least 3 points");
  const double log_t = std::log(t);
  auto objective = [&](double log_u) { return xi_objective(beta, log_t, log_u); };

  double lo = window.lo;
  double hi = window.hi;
  bool seen_positive = false;
  for (;;) {
    const auto u = logspace(lo, hi, window.points);
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = objective(std::log(u[i]));
    const auto best = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    if (g[best] <= 0.0 && !seen_positive) return 0.0;
    seen_positive = true;

    if (best == 0 && g[0] > g[1]) {
      if (lo <= window.min_lo) return kInf;
      hi = u[2];
      lo = std::max(window.min_lo, lo / kWindowShift);
      continue;
    }
    if (best + 1 == u.size() && hi < window.max_hi) {
      lo = u[u.size() - 3];
      hi = std::min(window.max_hi, hi * kWindowShift);
      continue;
    }
    const double a = std::log(u[best == 0 ? 0 : best - 1]);
    const double b = std::log(u[std::min(best + 1, u.size() - 1)]);
    const Extremum refined = golden_section_max(objective, a, b, 1e-12, 200);
    return std::max({g[best], refined.value, 0.0});
  }
}

double fsob_from_beta(const RateFunction& beta, double C1, double C2, double u) {
  require(u > 0.0, "fsob_from_beta needs u > 0");
  require(C1 >= 0.0 && std::isfinite(C1) && std::isfinite(C2), "fsob constants must be finite");
  if (C1 == 0.0) return -C2;
  const double log_u = std::log(u);
  auto integrand = [&](double tau) {
    const double t = std::exp(tau);
    const double xi = xi_from_beta(beta, t / 2.0);
    if (!std::isfinite(xi)) {
      fail(ErrorCode::xi_diverges, "xi is infinite at t = " + format_g17(t / 2.0) +
                                       " inside the integration range of F(" + format_g17(u) + ")");
    }
    return xi * t;
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, log_u - kQuadratureDepth, log_u, kQuadratureMaxDepth, kQuadratureTol, &error);
  return C1 * integral / u - C2;
}

double FSobDescriptor::inverse(double y) const {
  require(static_cast<bool>(F), "F-Sobolev descriptor has no evaluator");
  const double at_star = F(u_star);
  if (y < at_star) {
    fail(ErrorCode::not_invertible, "target " + format_g17(y) + " lies below F(u*) = " +
                                        format_g17(at_star));
  }
  if (y == at_star) return u_star;
  const double log_lo = std::log(u_star);
  double step = 1.0;
  double log_hi = log_lo + step;
  while (F(std::exp(log_hi)) < y) {
    step *= 2.0;
    log_hi = log_lo + step;
    if (log_hi > 700.0) return kInf;
  }
  const double log_v = smallest_satisfying([&](double x) { return F(std::exp(x)) >= y; }, log_lo,
                                           log_hi, kInverseIterations);
  return std::exp(log_v);
}

FSobDescriptor fsob_descriptor(const RateFunction& beta, double C1, double C2) {
  FSobDescriptor out;
  out.c1 = C1;
  out.c2 = C2;
  out.F = [beta, C1, C2](double u) { return fsob_from_beta(beta, C1, C2, u); };
  const auto grid = logspace(1e-3, 1e6, 46);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = out.F(grid[i]);
  std::size_t start = grid.size();
  for (std::size_t i = grid.size(); i-- > 0;) {
    if (!(values[i] > 0.0)) break;
    if (i + 1 < grid.size() && values[i] > values[i + 1]) break;
    start = i;
  }
  if (start == grid.size()) {
    fail(ErrorCode::not_invertible, "F has no positive non-decreasing tail on [1e-3, 1e6]");
  }
  out.u_star = grid[start];
  return out;
}

double beta_from_fsob(const FSobDescriptor& fsob, double C1, double C2, double u) {
  require(u > 0.0, "beta_from_fsob needs u > 0");
  require(C1 > 0.0 && C2 > 0.0, "beta_from_fsob needs C1, C2 > 0");
  return C1 * fsob.inverse(C2 * (1.0 + 1.0 / u));
}

DlsiFit detect_dlsi(std::span<const std::pair<double, double>> samples, double threshold) {
  require(samples.size() >= 8, "detect_dlsi needs at least 8 samples");
  std::vector<double> x, y;
  double u_min = kInf, u_max = 0.0;
  for (const auto& [u, b] : samples) {
    require(u > 0.0 && b > 0.0 && std::isfinite(b), "detect_dlsi needs u > 0 and finite beta > 0");
    x.push_back(1.0 / u);
    y.push_back(std::log(b));
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  require(u_max >= 100.0 * u_min * (1.0 - 1e-12), "detect_dlsi samples must span two decades");
  const LinearFit line = fit_line(x, y);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double spread = *hi - *lo;
  const double scale = std::max({1.0, std::abs(*lo), std::abs(*hi)});
  DlsiFit out;
  out.c = std::exp(line.intercept);
  out.c_prime = line.slope;
  out.degenerate = spread <= 1e-12 * scale;
  out.residual = out.degenerate ? line.max_abs_residual : line.max_abs_residual / spread;
  if (out.degenerate) out.c_prime = 0.0;
  out.is_dlsi = out.residual < threshold;
  return out;
}

double rothaus_tighten(double c_ls, double d_ls, double c_p) {
  require(c_ls > 0.0 && d_ls >= 0.0 && c_p > 0.0,
          "rothaus_tighten needs C_LS > 0, D_LS >= 0 and C_P > 0");
  return c_ls + (d_ls + 2.0) * c_p;
}

std::string fsob_csv(const FSobDescriptor& fsob, std::span<const double> u_grid) {
  std::string out = "u,F\n";
  for (double u : u_grid) out += format_g17(u) + "," + format_g17(fsob.F(u)) + "\n";
  return out;
}

void to_json(nlohmann::json& j, const DlsiFit& fit) {
  j = nlohmann::json{{"is_dlsi", fit.is_dlsi}, {"c", fit.c},           {"c_prime", fit.c_prime},
                     {"residual", fit.residual}, {"degenerate", fit.degenerate}};
}

}  // namespace ineqforge
