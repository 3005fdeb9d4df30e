#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ineqforge {

/// Asymptotic shape of a rate s -> beta(s) as s -> 0:
///   polynomial          beta ~ c s^{-exponent}
///   exponential         beta ~ exp(c s^{-exponent})
///   doubly_exponential  log log beta itself grows like a power of 1/s
///   tabulated           no closed shape recognized
enum class RateClass { polynomial, exponential, doubly_exponential, tabulated };

struct ClassTag {
  RateClass kind = RateClass::tabulated;
  double exponent = 0.0;
  double c = 0.0;

  static ClassTag polynomial(double e, double c = 1.0) { return {RateClass::polynomial, e, c}; }
  static ClassTag exponential(double p, double c = 1.0) { return {RateClass::exponential, p, c}; }
  static ClassTag doubly_exponential() { return {RateClass::doubly_exponential, 0.0, 0.0}; }
  static ClassTag tabulated() { return {}; }

  [[nodiscard]] std::string describe() const;
  friend bool operator==(const ClassTag&, const ClassTag&) = default;
};

std::string_view to_string(RateClass kind) noexcept;

/// The rate is asserted on (s_min, s_max].
struct Validity {
  double s_min = 0.0;
  double s_max = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool contains(double s) const { return s > s_min && s <= s_max; }
  friend bool operator==(const Validity&, const Validity&) = default;
};

/// Evaluable rate function. Values are handled as log beta so that rates of
/// size exp(1e4) stay representable; the evaluator receives log s.
class RateFunction {
 public:
  using LogEvaluator = std::function<double(double log_s)>;

  RateFunction() = default;
  RateFunction(LogEvaluator log_eval, ClassTag tag, std::map<std::string, double> params,
               Validity validity, nlohmann::json recipe = nullptr);

  /// log beta(s); +inf outside the validity range or where an input of the
  /// construction was an infinite sentinel.
  [[nodiscard]] double log_value(double s) const;
  /// beta(s); overflows to +inf when log beta exceeds the double range.
  [[nodiscard]] double value(double s) const;

  [[nodiscard]] const ClassTag& class_tag() const { return tag_; }
  void set_class_tag(ClassTag tag) { tag_ = tag; }
  [[nodiscard]] const std::map<std::string, double>& params() const { return params_; }
  [[nodiscard]] std::map<std::string, double>& params() { return params_; }
  [[nodiscard]] const Validity& validity() const { return validity_; }
  [[nodiscard]] const nlohmann::json& recipe() const { return recipe_; }
  [[nodiscard]] bool has_evaluator() const { return static_cast<bool>(log_eval_); }

  /// Piecewise-constant upper bound for a non-increasing rate known at
  /// increasing nodes s_i: beta(s) <= beta(s_i) for s_i <= s.
  static RateFunction from_table(std::vector<double> s, std::vector<double> log_beta,
                                 Validity validity, ClassTag tag = {},
                                 std::map<std::string, double> params = {});

 private:
  LogEvaluator log_eval_;
  ClassTag tag_;
  std::map<std::string, double> params_;
  Validity validity_;
  nlohmann::json recipe_;
};

/// 40 log-spaced points covering the validity range: [1e-4 s_max, s_max]
/// when s_max is finite, [1e-4, 1e2] otherwise.
std::vector<double> probe_grid(const Validity& validity, std::size_t count = 40);

/// True when log beta never increases along the increasing grid.
bool is_non_increasing(const RateFunction& rate, std::span<const double> s_grid);

/// Fits polynomial and exponential shapes on `samples` log-spaced points of
/// [s_lo, s_hi] and keeps the one whose residual (relative to the spread of
/// the fitted quantity) is smaller; tabulated when neither is below 5%.
ClassTag fit_class(const RateFunction& rate, double s_lo, double s_hi, std::size_t samples = 12);

/// Small-s window used for class tags: two decades ending at
/// min(s_max, 1e-2).
ClassTag fit_class_small_s(const RateFunction& rate);

inline constexpr double kClassResidualThreshold = 0.05;

void to_json(nlohmann::json& j, const ClassTag& tag);
void from_json(const nlohmann::json& j, ClassTag& tag);
void to_json(nlohmann::json& j, const Validity& validity);
void from_json(const nlohmann::json& j, Validity& validity);

}  // namespace ineqforge
