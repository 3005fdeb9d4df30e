#include "ineqforge/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ineqforge/errors.hpp"
#include "ineqforge/json_io.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

struct ShapeFit {
  LinearFit line;
  double score = kInf;  // max residual relative to the spread of y
};

ShapeFit fit_shape(std::span<const double> x, std::span<const double> y) {
  ShapeFit out;
  for (double v : y) {
    if (!std::isfinite(v)) return out;
  }
  out.line = fit_line(x, y);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double spread = *hi - *lo;
  out.score = spread > 0.0 ? out.line.max_abs_residual / spread : out.line.max_abs_residual;
  return out;
}

}  // namespace

std::string_view to_string(RateClass kind) noexcept {
  switch (kind) {
    case RateClass::polynomial: return "polynomial";
    case RateClass::exponential: return "exponential";
    case RateClass::doubly_exponential: return "doubly_exponential";
    case RateClass::tabulated: return "tabulated";
  }
  return "tabulated";
}

std::string ClassTag::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == RateClass::polynomial || kind == RateClass::exponential) {
    os << "(exponent=" << exponent << ", c=" << c << ")";
  }
  return os.str();
}

RateFunction::RateFunction(LogEvaluator log_eval, ClassTag tag,
                           std::map<std::string, double> params, Validity validity,
                           nlohmann::json recipe)
    : log_eval_(std::move(log_eval)),
      tag_(tag),
      params_(std::move(params)),
      validity_(validity),
      recipe_(std::move(recipe)) {
  require(validity_.s_min >= 0.0 && validity_.s_max > validity_.s_min,
          "rate validity range must be a non-empty interval of (0, inf]");
}

double RateFunction::log_value(double s) const {
  if (!validity_.contains(s) || !log_eval_) return kInf;
  const double v = log_eval_(std::log(s));
  return std::isnan(v) ? kInf : v;
}

double RateFunction::value(double s) const { return std::exp(log_value(s)); }

RateFunction RateFunction::from_table(std::vector<double> s, std::vector<double> log_beta,
                                      Validity validity, ClassTag tag,
                                      std::map<std::string, double> params) {
  require(s.size() == log_beta.size() && !s.empty(), "rate table needs matching, non-empty columns");
  require(std::is_sorted(s.begin(), s.end()), "rate table nodes must be increasing");
  auto eval = [s = std::move(s), lb = std::move(log_beta)](double log_s) {
    const double x = std::exp(log_s);
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    if (it == s.begin()) return kInf;
    return lb[static_cast<std::size_t>(it - s.begin()) - 1];
  };
  return RateFunction(std::move(eval), tag, std::move(params), validity);
}

std::vector<double> probe_grid(const Validity& validity, std::size_t count) {
  const double hi = std::isfinite(validity.s_max) ? validity.s_max : 1e2;
  double lo = std::isfinite(validity.s_max) ? 1e-4 * validity.s_max : 1e-4;
  lo = std::max(lo, std::nextafter(validity.s_min, kInf));
  return logspace(lo, hi, count);
}

bool is_non_increasing(const RateFunction& rate, std::span<const double> s_grid) {
  double previous = kInf;
  for (double s : s_grid) {
    const double v = rate.log_value(s);
    if (v > previous) return false;
    previous = v;
  }
  return true;
}

ClassTag fit_class(const RateFunction& rate, double s_lo, double s_hi, std::size_t samples) {
  require(s_lo > 0.0 && s_hi > s_lo && samples >= 3, "class fit needs 0 < s_lo < s_hi");
  const auto s = logspace(s_lo, s_hi, samples);
  std::vector<double> x(samples), y1(samples), y2(samples), y3(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    x[i] = -std::log(s[i]);
    y1[i] = rate.log_value(s[i]);
    y2[i] = y1[i] > 0.0 ? std::log(y1[i]) : kInf;
    y3[i] = y2[i] > 0.0 ? std::log(y2[i]) : kInf;
  }
  const ShapeFit poly = fit_shape(x, y1);
  const ShapeFit expo = fit_shape(x, y2);
  const ShapeFit dexp = fit_shape(x, y3);
  const double best = std::min({poly.score, expo.score});
  if (best <= kClassResidualThreshold) {
    if (expo.score <= poly.score) {
      return ClassTag::exponential(expo.line.slope, std::exp(expo.line.intercept));
    }
    return ClassTag::polynomial(poly.line.slope, std::exp(poly.line.intercept));
  }
  if (dexp.score <= kClassResidualThreshold && dexp.line.slope > 0.0) {
    return ClassTag::doubly_exponential();
  }
  return ClassTag::tabulated();
}

ClassTag fit_class_small_s(const RateFunction& rate) {
  const double hi = std::min(rate.validity().s_max, 1e-2);
  return fit_class(rate, 1e-2 * hi, hi);
}

void to_json(nlohmann::json& j, const ClassTag& tag) {
  j = nlohmann::json{{"kind", std::string(to_string(tag.kind))}};
  if (tag.kind == RateClass::polynomial || tag.kind == RateClass::exponential) {
    j["exponent"] = real_to_json(tag.exponent);
    j["c"] = real_to_json(tag.c);
  }
}

void from_json(const nlohmann::json& j, ClassTag& tag) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "polynomial") {
    tag = ClassTag::polynomial(real_from_json(j.at("exponent")), real_from_json(j.at("c")));
  } else if (kind == "exponential") {
    tag = ClassTag::exponential(real_from_json(j.at("exponent")), real_from_json(j.at("c")));
  } else if (kind == "doubly_exponential") {
    tag = ClassTag::doubly_exponential();
  } else if (kind == "tabulated") {
    tag = ClassTag::tabulated();
  } else {
    fail(ErrorCode::parse_error, "unknown rate class '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const Validity& validity) {
  j = nlohmann::json{{"s_min", real_to_json(validity.s_min)},
                     {"s_max", real_to_json(validity.s_max)}};
}

void from_json(const nlohmann::json& j, Validity& validity) {
  validity.s_min = real_from_json(j.at("s_min"));
  validity.s_max = real_from_json(j.at("s_max"));
}

}  // namespace ineqforge
