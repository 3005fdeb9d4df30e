#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ineqforge/baseline.hpp"
#include "ineqforge/geometry.hpp"
#include "ineqforge/lyapunov.hpp"
#include "ineqforge/potential.hpp"
#include "ineqforge/rate_function.hpp"

namespace ineqforge {

/// Rate in log form: log_s -> log beta(exp(log_s)).
using LogRate = std::function<double(double log_s)>;
/// Local rate on A_r in log form: (r, log_s) -> log beta_r(exp(log_s)).
using LocalLogRate = std::function<double(double r, double log_s)>;

LogRate log_rate_of(const BaselineBeta& base);

/// eps = 0.05, 0.10, ..., 0.95.
std::vector<double> default_eps_grid();

// ---------------------------------------------------------------------------
// Rate formulas. Each has a log-domain form (used by certificates) and a
// plain form returning beta itself. Infinite sentinels propagate to +inf.

/// min over eps of (5 / (2 eps)) beta(eps s/10 ^ eps/16 ^ 2(1-eps)/G(r)) e^{g(r)}
/// with r = Phi^{-1}(4b/eps v 4/(s eps)).
double log_alpha_route_one(const LogRate& base, const GeometryProfile& profile, double b_const,
                           std::span<const double> eps_grid, double s);
double alpha_route_one(const BaselineBeta& base, const GeometryProfile& profile, double b_const,
                       std::span<const double> eps_grid, double s);

/// 2 exp(2 H(r0 v r)) beta((s/8) exp(-H(r))) with r = Phi^{-1}(4/s v b s/2).
double log_alpha_route_two(const LogRate& base, const GeometryProfile& profile, double b_const,
                           double r0, double s);
double alpha_route_two(const BaselineBeta& base, const GeometryProfile& profile, double b_const,
                       double r0, double s);

/// Route one evaluated on a level-set profile (v_levels with level
/// enlargement, so g(r) = r + 2 and G is the gradient bound on {V < r + 2}).
double alpha_levelset(const BaselineBeta& base, const GeometryProfile& profile, double b_const,
                      std::span<const double> eps_grid, double s);

/// beta_local(r, s/2) at r = Phi^{-1}(2/s). With exact chaining the local
/// scale becomes s / (2k) and the result is multiplied by
/// k = 1 + b / Phi(r_min), which bounds 1 + b / Phi(r) for every admissible r.
double log_alpha_general(const LocalLogRate& beta_local, const GeometryProfile& profile,
                         double b_const, double s, bool exact_chaining = true);
double alpha_general(const std::function<double(double r, double s)>& beta_local,
                     const GeometryProfile& profile, double b_const, double s,
                     bool exact_chaining = true);

/// Generalized inverse inf{u >= 0 : eta(u) >= y} of a non-decreasing eta.
double eta_inverse(const std::function<double(double)>& eta, double y);

/// Variant 1: C (1 + e^{u} gamma^n(u)); variant 2:
/// C (1 + theta^n(u) s^{-n/2} e^{(n+4) u / 2}); u = eta^{-1}(c / s).
double log_beta_logdensity(int variant, const std::function<double(double)>& eta,
                           const std::function<double(double)>& gamma_or_theta, int n, double c,
                           double C, double s);
double beta_logdensity(int variant, const std::function<double(double)>& eta,
                       const std::function<double(double)>& gamma_or_theta, int n, double c,
                       double C, double s);

/// A checked premise attached to a certificate.
struct Assumption {
  std::string name;
  std::string artifact;
  bool checked = false;
  nlohmann::json detail = nlohmann::json::object();

  friend bool operator==(const Assumption&, const Assumption&) = default;
};

/// Exponent p in C exp(c s^{-p}) for the distance-witness cases 1 to 4.
double distance_exponent(int case_id, double b, double b_prime);

/// Premise names each case requires in the assumption list.
std::vector<std::string> distance_premises(int case_id);

/// C exp(c s^{-p}). Throws CasePremiseUnchecked unless every premise of the
/// case is present and checked.
double log_beta_distance(int case_id, double b, double b_prime, double c, double C, double s,
                         std::span<const Assumption> assumptions);
double beta_distance(int case_id, double b, double b_prime, double c, double C, double s,
                     std::span<const Assumption> assumptions);

// ---------------------------------------------------------------------------
// Certificates.

enum class CertificateKind { SPI, DLSI, LSI, FSob };
std::string_view to_string(CertificateKind kind) noexcept;

/// Rate samples stored with a certificate (log beta on the probe grid).
struct RateTable {
  std::vector<double> s;
  std::vector<double> log_beta;

  friend bool operator==(const RateTable&, const RateTable&) = default;
};

struct Certificate {
  CertificateKind kind = CertificateKind::SPI;
  RateFunction rate;
  RateTable table;
  std::optional<double> c_ls;
  std::optional<double> d_ls;
  std::optional<double> fsob_exponent;  // F(u) = log_+^exponent(u)
  bool nash_type = false;
  std::vector<Assumption> assumptions;
  std::string route;
  std::vector<std::string> inputs;
  std::vector<std::string> unnormalized_constants;
  std::string config_hash;

  [[nodiscard]] bool normalized() const { return unnormalized_constants.empty(); }
  [[nodiscard]] const Assumption* find_assumption(std::string_view name) const;
  /// Digest of the canonical JSON body (everything except the id itself).
  [[nodiscard]] std::string id() const;
};

enum class Route { main1, main2, levelset, general };
std::string_view to_string(Route route) noexcept;
Route parse_route(std::string_view text);

struct RouteOptions {
  SetFamily family = SetFamily::balls();
  BaselineBeta base = BaselineBeta::lebesgue(1);
  std::vector<double> eps_grid = default_eps_grid();
  bool exact_chaining = true;
  double local_C = 1.0;  // constant of the local rate used by the general route
};

/// Assembles a certificate from a validated witness. Throws InvalidArgument
/// for witnesses whose phi stays bounded (Poincare-grade only).
Certificate certify_route(const PotentialSpec& spec, const LyapunovWitness& witness, Route route,
                          const RouteOptions& options = {});

struct LogDensityOptions {
  int variant = 1;
  double eta_coef = 1.0;   // eta(u) = eta_coef * u^eta_power
  double eta_power = 1.0;
  double a0 = 0.5;
  double c = 1.0;
  double C = 1.0;
  double check_radius = 0.0;  // 0 selects an automatic radius
};

Certificate certify_logdensity(const PotentialSpec& spec, const LogDensityOptions& options = {});

struct DistanceOptions {
  int case_id = 0;  // 0 picks the first case whose premises hold, in order 3, 1, 2, 4
  double c = 1.0;
  double C = 1.0;
  double check_radius = 8.0;
  std::size_t check_points = 10001;
};

Certificate certify_distance(const PotentialSpec& spec, const DistanceOptions& options = {});

/// Refines an SPI certificate from its class tag: exponential with p = 1
/// (within 5%) becomes DLSI; p > 1 becomes FSob with exponent 1/p, or
/// 2(1 - 1/b) when the rate carries b in (1, 2); polynomial is marked
/// Nash-type; everything else is returned unchanged.
Certificate classify(const Certificate& cert);

inline constexpr double kDlsiExponentTolerance = 0.05;

/// Wraps an arbitrary rate in an SPI certificate and samples its table on
/// the probe grid of its validity range.
Certificate make_certificate(RateFunction rate, std::string route,
                             std::vector<std::string> unnormalized_constants = {});

/// Rebuilds the evaluator of a rate from its recipe.
RateFunction rate_from_recipe(const nlohmann::json& recipe);

nlohmann::json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const Assumption& a);
void from_json(const nlohmann::json& j, Assumption& a);

}  // namespace ineqforge
