#include "ineqforge/baseline.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {

double lebesgue_log_beta(int n, double s) {
  require(n >= 1, "dimension must be positive");
  require(s > 0.0, "lebesgue_beta needs s > 0");
  return -0.5 * n * std::log(4.0 * std::numbers::pi * s);
}

double lebesgue_beta(int n, double s) {
  require(n >= 1, "dimension must be positive");
  require(s > 0.0, "lebesgue_beta needs s > 0");
  return std::pow(4.0 * std::numbers::pi * s, -0.5 * n);
}

double nash_constant(int n) {
  require(n >= 1, "dimension must be positive");
  const double dn = n;
  return 2.0 * (1.0 + 2.0 / dn) * std::pow(1.0 + dn / 2.0, 2.0 / dn) *
         std::pow(8.0 * std::numbers::pi, -dn / 4.0);
}

NashOptimum nash_from_spi(int n, double energy, double l1_norm) {
  require(energy > 0.0 && l1_norm > 0.0, "nash_from_spi needs E > 0 and M > 0");
  const double m2 = l1_norm * l1_norm;
  // Minimize in t = log s, where the objective is convex.
  auto objective = [&](double t) {
    const double s = std::exp(t);
    return -(s * energy + lebesgue_beta(n, s) * m2);
  };
  const double centre = std::log(m2 / energy) * 2.0 / (n + 2.0);
  const Extremum best = golden_section_max(objective, centre - 60.0, centre + 60.0, 1e-15, 400);
  NashOptimum out;
  out.s = std::exp(best.x);
  out.bound = -best.value;
  out.constant = std::pow(out.bound, 1.0 + 2.0 / n) / (energy * std::pow(l1_norm, 4.0 / n));
  return out;
}

double neumann_kernel_sup(double interval_length, double t, double tol) {
  require(interval_length > 0.0, "neumann_kernel_sup needs r > 0");
  require(t > 0.0 && t <= 1.0, "neumann_kernel_sup needs 0 < t <= 1");
  require(tol > 0.0, "neumann_kernel_sup needs tol > 0");
  const double r = interval_length;
  auto term = [&](long k) {
    const double odd = (2.0 * k - 1.0) * r;
    const double even = 2.0 * k * r;
    return std::exp(-odd * odd / (2.0 * t)) + std::exp(-even * even / (2.0 * t));
  };
  double partial = 2.0;
  for (long k = 1; k < 100000000; ++k) {
    const double next = term(k);
    if (next < tol * partial) break;
    partial += next;
  }
  return partial / std::sqrt(2.0 * std::numbers::pi * t);
}

double bord_log_beta(int n, double theta, double s, double C) {
  require(n >= 1, "dimension must be positive");
  require(theta > 0.0 && s > 0.0 && C > 0.0, "bord_beta needs theta, s, C > 0");
  return std::log(C) + n * std::log(theta) + log_add_exp(0.0, -0.5 * n * std::log(s));
}

double bord_beta(int n, double theta, double s, double C) {
  require(n >= 1, "dimension must be positive");
  require(theta > 0.0 && s > 0.0 && C > 0.0, "bord_beta needs theta, s, C > 0");
  return C * std::pow(theta, n) * (1.0 + std::pow(s, -0.5 * n));
}

double level_set_hessian_bound(const PotentialSpec& spec, double r) {
  const ShellBracket shell = level_shell(spec, r);
  return hessian_bound(spec, shell.lo, shell.hi);
}

void BaselineBeta::validate() const {
  require(n >= 1, "baseline dimension must be positive");
  require(theta > 0.0 && std::isfinite(theta), "baseline theta must be positive");
  require(C > 0.0 && std::isfinite(C), "baseline constant must be positive");
}

double BaselineBeta::log_value(double s) const {
  if (!(s > 0.0)) return kInf;
  if (s == kInf) return form == BaselineForm::lebesgue ? -kInf : std::log(C) + n * std::log(theta);
  return form == BaselineForm::lebesgue ? lebesgue_log_beta(n, s) : bord_log_beta(n, theta, s, C);
}

double BaselineBeta::operator()(double s) const { return std::exp(log_value(s)); }

std::string BaselineBeta::describe() const {
  std::ostringstream os;
  if (form == BaselineForm::lebesgue) {
    os << "lebesgue(n=" << n << ")";
  } else {
    os << "bord(n=" << n << ", theta=" << theta << ", C=" << C << ")";
  }
  return os.str();
}

void to_json(nlohmann::json& j, const BaselineBeta& base) {
  j = nlohmann::json{{"form", base.form == BaselineForm::lebesgue ? "lebesgue" : "bord"},
                     {"n", base.n}};
  if (base.form == BaselineForm::bord) {
    j["theta"] = base.theta;
    j["C"] = base.C;
    j["unnormalized"] = base.unnormalized;
  }
}

void from_json(const nlohmann::json& j, BaselineBeta& base) {
  try {
    const std::string form = j.at("form").get<std::string>();
    const int n = j.at("n").get<int>();
    if (form == "lebesgue") {
      base = BaselineBeta::lebesgue(n);
    } else if (form == "bord") {
      base = BaselineBeta::bord(n, j.at("theta").get<double>(), j.value("C", 1.0),
                                j.value("unnormalized", true));
    } else {
      fail(ErrorCode::parse_error, "unknown baseline form '" + form + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed baseline: ") + e.what());
  }
  base.validate();
}

}  // namespace ineqforge
