#include "ineqforge/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ineqforge/errors.hpp"
#include "ineqforge/json_io.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

constexpr int kMaxDoublings = 2100;
constexpr double kCurvatureSlack = 1e-12;

double finite_or_inf(double v) { return std::isnan(v) ? kInf : v; }

nlohmann::json params_to_json(const std::map<std::string, double>& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : params) j[k] = real_to_json(v);
  return j;
}

std::map<std::string, double> params_from_json(const nlohmann::json& j) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = real_from_json(v);
  return out;
}

RateTable sample_table(const RateFunction& rate) {
  RateTable table;
  table.s = probe_grid(rate.validity());
  table.log_beta.resize(table.s.size());
  parallel_for(table.s.size(), [&](std::size_t i) { table.log_beta[i] = rate.log_value(table.s[i]); });
  return table;
}

std::string witness_id(const LyapunovWitness& w) {
  return "witness:" + fnv1a_hex(canonical_dump(nlohmann::json(w)));
}

Assumption make_assumption(std::string name, std::string artifact, bool checked,
                           nlohmann::json detail = nlohmann::json::object()) {
  return {std::move(name), std::move(artifact), checked, std::move(detail)};
}

// Theta for the local rate on A_r: spectral-norm bound of the Hessian over
// the whole set. Floored at 1 because the local constant is unnormalized and
// a vanishing theta would wrongly shrink the rate.
double local_theta(const PotentialSpec& spec, const SetFamily& family, double r) {
  const double R = outer_radius(spec, family, r);
  if (!std::isfinite(R)) return kInf;
  return std::max(1.0, hessian_bound(spec, 0.0, R));
}

Validity route_validity(Route route, double b_const) {
  if (route == Route::main2 && b_const > 0.0) return {0.0, std::sqrt(8.0 / b_const)};
  return {};
}

double eta_power_value(double coef, double power, double u) {
  return coef * std::pow(std::max(u, 0.0), power);
}

}  // namespace

LogRate log_rate_of(const BaselineBeta& base) {
  base.validate();
  return [base](double log_s) {
    if (base.form == BaselineForm::lebesgue) {
      return -0.5 * base.n * (std::log(4.0 * std::acos(-1.0)) + log_s);
    }
    return std::log(base.C) + base.n * std::log(base.theta) +
           log_add_exp(0.0, -0.5 * base.n * log_s);
  };
}

std::vector<double> default_eps_grid() {
  std::vector<double> out;
  for (int k = 1; k <= 19; ++k) out.push_back(0.05 * k);
  return out;
}

double log_alpha_route_one(const LogRate& base, const GeometryProfile& profile, double b_const,
                           std::span<const double> eps_grid, double s) {
  require(s > 0.0, "route one needs s > 0");
  require(!eps_grid.empty(), "route one needs a non-empty eps grid");
  require(b_const >= 0.0, "b_const must be non-negative");
  double best = kInf;
  for (double eps : eps_grid) {
    require(eps > 0.0 && eps < 1.0, "eps grid values must lie in (0, 1)");
    const double target = std::max(4.0 * b_const / eps, 4.0 / (s * eps));
    double r = profile.phi_inverse(target);
    if (!std::isfinite(r)) continue;
    r = profile.admissible(r);
    const double G = profile.G_of_r(r);
    const double g = profile.g_of_r(r);
    if (!std::isfinite(G) || !std::isfinite(g)) continue;
    double log_arg = std::min(std::log(eps * s / 10.0), std::log(eps / 16.0));
    if (G > 0.0) log_arg = std::min(log_arg, std::log(2.0 * (1.0 - eps)) - std::log(G));
    const double term = std::log(5.0 / (2.0 * eps)) + base(log_arg) + g;
    best = std::min(best, finite_or_inf(term));
  }
  return best;
}

double alpha_route_one(const BaselineBeta& base, const GeometryProfile& profile, double b_const,
                       std::span<const double> eps_grid, double s) {
  return std::exp(log_alpha_route_one(log_rate_of(base), profile, b_const, eps_grid, s));
}

double log_alpha_route_two(const LogRate& base, const GeometryProfile& profile, double b_const,
                           double r0, double s) {
  require(s > 0.0, "route two needs s > 0");
  require(b_const >= 0.0, "b_const must be non-negative");
  double r = profile.phi_inverse(std::max(4.0 / s, b_const * s / 2.0));
  if (!std::isfinite(r)) return kInf;
  r = profile.admissible(r);
  const double h_outer = profile.H_of_r(std::max(r0, r));
  const double h_inner = profile.H_of_r(r);
  if (!std::isfinite(h_outer) || !std::isfinite(h_inner)) return kInf;
  return finite_or_inf(std::log(2.0) + 2.0 * h_outer + base(std::log(s / 8.0) - h_inner));
}

double alpha_route_two(const BaselineBeta& base, const GeometryProfile& profile, double b_const,
                       double r0, double s) {
  return std::exp(log_alpha_route_two(log_rate_of(base), profile, b_const, r0, s));
}

double alpha_levelset(const BaselineBeta& base, const GeometryProfile& profile, double b_const,
                      std::span<const double> eps_grid, double s) {
  return alpha_route_one(base, profile, b_const, eps_grid, s);
}

double log_alpha_general(const LocalLogRate& beta_local, const GeometryProfile& profile,
                         double b_const, double s, bool exact_chaining) {
  require(s > 0.0, "general route needs s > 0");
  require(b_const >= 0.0, "b_const must be non-negative");
  double r = profile.phi_inverse(2.0 / s);
  if (!std::isfinite(r)) return kInf;
  r = profile.admissible(r);
  if (!exact_chaining || b_const == 0.0) return finite_or_inf(beta_local(r, std::log(s / 2.0)));
  // Any k >= 1 + b / Phi(r) works. Taking the value at r_min keeps k fixed in
  // s; with k = 1 + b / Phi(r(s)) the rate rises again for large s.
  const double phi = profile.phi_of_r(profile.r_min);
  if (!(phi > 0.0)) return kInf;
  const double k = 1.0 + b_const / phi;
  return finite_or_inf(std::log(k) + beta_local(r, std::log(s / (2.0 * k))));
}

double alpha_general(const std::function<double(double r, double s)>& beta_local,
                     const GeometryProfile& profile, double b_const, double s,
                     bool exact_chaining) {
  auto log_local = [&](double r, double log_s) { return std::log(beta_local(r, std::exp(log_s))); };
  return std::exp(log_alpha_general(log_local, profile, b_const, s, exact_chaining));
}

double eta_inverse(const std::function<double(double)>& eta, double y) {
  if (std::isnan(y) || y == kInf) return kInf;
  if (eta(0.0) >= y) return 0.0;
  double hi = 1.0;
  for (int k = 0; k < kMaxDoublings && eta(hi) < y; ++k) hi *= 2.0;
  if (eta(hi) < y) return kInf;
  return smallest_satisfying([&](double u) { return eta(u) >= y; }, 0.0, hi);
}

double log_beta_logdensity(int variant, const std::function<double(double)>& eta,
                           const std::function<double(double)>& gamma_or_theta, int n, double c,
                           double C, double s) {
  require(variant == 1 || variant == 2, "log-density variant must be 1 or 2");
  require(n >= 1, "dimension must be positive");
  require(c > 0.0 && C > 0.0 && s > 0.0, "log-density rate needs c, C, s > 0");
  const double u = eta_inverse(eta, c / s);
  if (!std::isfinite(u)) return kInf;
  const double log_env = std::log(gamma_or_theta(u));
  double inner = 0.0;
  if (variant == 1) {
    inner = u + n * log_env;
  } else {
    inner = n * log_env - 0.5 * n * std::log(s) + 0.5 * (n + 4.0) * u;
  }
  return finite_or_inf(std::log(C) + log_add_exp(0.0, inner));
}

double beta_logdensity(int variant, const std::function<double(double)>& eta,
                       const std::function<double(double)>& gamma_or_theta, int n, double c,
                       double C, double s) {
  return std::exp(log_beta_logdensity(variant, eta, gamma_or_theta, n, c, C, s));
}

double distance_exponent(int case_id, double b, double b_prime) {
  require(case_id >= 1 && case_id <= 4, "distance case must be 1, 2, 3 or 4");
  if (case_id == 3) return 1.0;
  require(b > 1.0 && std::isfinite(b), "distance cases need b > 1");
  if (case_id == 1) return b / (2.0 * std::min(b - 1.0, 1.0));
  require(b_prime >= b && std::isfinite(b_prime), "distance cases 2 and 4 need b' >= b");
  return b_prime / (b_prime + b - 2.0);
}

std::vector<std::string> distance_premises(int case_id) {
  std::vector<std::string> out = {"curvature_bound", "curvature_growth"};
  switch (case_id) {
    case 1: out.insert(out.end(), {"c0_nonnegative", "lower_growth"}); break;
    case 2: out.insert(out.end(), {"c0_nonnegative", "lower_growth", "upper_growth"}); break;
    case 3: out.insert(out.end(), {"c0_nonpositive", "quadratic_dominance"}); break;
    case 4: out.insert(out.end(), {"c0_nonpositive", "lower_growth", "upper_growth"}); break;
    default: require(false, "distance case must be 1, 2, 3 or 4");
  }
  return out;
}

double log_beta_distance(int case_id, double b, double b_prime, double c, double C, double s,
                         std::span<const Assumption> assumptions) {
  for (const auto& name : distance_premises(case_id)) {
    const auto it = std::find_if(assumptions.begin(), assumptions.end(),
                                 [&](const Assumption& a) { return a.name == name; });
    if (it == assumptions.end() || !it->checked) {
      fail(ErrorCode::case_premise_unchecked,
           "distance case " + std::to_string(case_id) + " needs the checked premise '" + name + "'");
    }
  }
  require(c > 0.0 && C > 0.0 && s > 0.0, "distance rate needs c, C, s > 0");
  const double p = distance_exponent(case_id, b, b_prime);
  return std::log(C) + c * std::exp(-p * std::log(s));
}

double beta_distance(int case_id, double b, double b_prime, double c, double C, double s,
                     std::span<const Assumption> assumptions) {
  return std::exp(log_beta_distance(case_id, b, b_prime, c, C, s, assumptions));
}

std::string_view to_string(CertificateKind kind) noexcept {
  switch (kind) {
    case CertificateKind::SPI: return "SPI";
    case CertificateKind::DLSI: return "DLSI";
    case CertificateKind::LSI: return "LSI";
    case CertificateKind::FSob: return "FSob";
  }
  return "SPI";
}

std::string_view to_string(Route route) noexcept {
  switch (route) {
    case Route::main1: return "main1";
    case Route::main2: return "main2";
    case Route::levelset: return "levelset";
    case Route::general: return "general";
  }
  return "main1";
}

Route parse_route(std::string_view text) {
  for (Route r : {Route::main1, Route::main2, Route::levelset, Route::general}) {
    if (to_string(r) == text) return r;
  }
  fail(ErrorCode::invalid_argument, "unknown route '" + std::string(text) + "'");
}

const Assumption* Certificate::find_assumption(std::string_view name) const {
  const auto it = std::find_if(assumptions.begin(), assumptions.end(),
                               [&](const Assumption& a) { return a.name == name; });
  return it == assumptions.end() ? nullptr : &*it;
}

Certificate make_certificate(RateFunction rate, std::string route,
                             std::vector<std::string> unnormalized_constants) {
  Certificate cert;
  cert.table = sample_table(rate);
  cert.rate = std::move(rate);
  cert.route = std::move(route);
  cert.unnormalized_constants = std::move(unnormalized_constants);
  return cert;
}

RateFunction rate_from_recipe(const nlohmann::json& recipe) {
  try {
    const std::string route = recipe.at("route").get<std::string>();
    if (route == "distance") {
      const int case_id = recipe.at("case").get<int>();
      const double b = recipe.at("b").get<double>();
      const double b_prime = recipe.at("b_prime").get<double>();
      const double c = recipe.at("c").get<double>();
      const double C = recipe.at("C").get<double>();
      const double p = distance_exponent(case_id, b, b_prime);
      auto eval = [p, c, C](double log_s) { return std::log(C) + c * std::exp(-p * log_s); };
      return RateFunction(eval, ClassTag::exponential(p, c),
                          {{"b", b}, {"b_prime", b_prime}, {"c", c}, {"C", C}, {"p", p}},
                          {0.0, 1.0}, recipe);
    }
    if (route == "logdensity") {
      const auto spec = recipe.at("potential").get<PotentialSpec>();
      const int variant = recipe.at("variant").get<int>();
      const double coef = recipe.at("eta").at("coef").get<double>();
      const double power = recipe.at("eta").at("power").get<double>();
      const double c = recipe.at("c").get<double>();
      const double C = recipe.at("C").get<double>();
      auto eta = [coef, power](double u) { return eta_power_value(coef, power, u); };
      std::function<double(double)> envelope;
      if (variant == 1) {
        envelope = [spec](double u) { return gradient_bound(spec, level_shell(spec, u).hi); };
      } else {
        envelope = [spec](double u) { return level_set_hessian_bound(spec, u); };
      }
      auto eval = [=](double log_s) {
        return log_beta_logdensity(variant, eta, envelope, spec.dimension, c, C, std::exp(log_s));
      };
      return RateFunction(eval, ClassTag::tabulated(),
                          {{"c", c}, {"C", C}, {"eta_coef", coef}, {"eta_power", power},
                           {"variant", variant}},
                          {0.0, 1.0}, recipe);
    }

    const Route r = parse_route(route);
    const auto spec = recipe.at("potential").get<PotentialSpec>();
    const auto witness = recipe.at("witness").get<LyapunovWitness>();
    const auto family = recipe.at("set_family").get<SetFamily>();
    const auto base = recipe.at("baseline").get<BaselineBeta>();
    const GeometryProfile profile = make_profile(spec, witness, family);
    const double b = witness.b_const;
    std::map<std::string, double> params = {{"b_const", b}, {"r0", witness.r0},
                                            {"a", witness.params.a}};
    RateFunction::LogEvaluator eval;
    switch (r) {
      case Route::main1:
      case Route::levelset: {
        const auto eps = recipe.at("eps_grid").get<std::vector<double>>();
        eval = [profile, b, eps, log_base = log_rate_of(base)](double log_s) {
          return log_alpha_route_one(log_base, profile, b, eps, std::exp(log_s));
        };
        break;
      }
      case Route::main2: {
        const double r0 = witness.r0;
        eval = [profile, b, r0, log_base = log_rate_of(base)](double log_s) {
          return log_alpha_route_two(log_base, profile, b, r0, std::exp(log_s));
        };
        break;
      }
      case Route::general: {
        const bool exact = recipe.at("exact_chaining").get<bool>();
        const double local_C = recipe.at("local_C").get<double>();
        const int n = spec.dimension;
        LocalLogRate local = [spec, family, local_C, n](double radius, double log_s) {
          const double theta = local_theta(spec, family, radius);
          if (!std::isfinite(theta)) return kInf;
          return std::log(local_C) + n * std::log(theta) + log_add_exp(0.0, -0.5 * n * log_s);
        };
        eval = [profile, b, exact, local](double log_s) {
          return log_alpha_general(local, profile, b, std::exp(log_s), exact);
        };
        params["exact_chaining"] = exact ? 1.0 : 0.0;
        break;
      }
    }
    return RateFunction(eval, ClassTag::tabulated(), params, route_validity(r, b), recipe);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed rate recipe: ") + e.what());
  }
}

Certificate certify_route(const PotentialSpec& spec, const LyapunovWitness& witness, Route route,
                          const RouteOptions& options) {
  spec.validate();
  witness.params.validate();
  require(witness.certificate_grade(),
          "witness phi is bounded (Poincare-grade only); certificate routes need phi -> infinity");
  require(options.base.n == spec.dimension, "baseline dimension must match the potential");
  options.base.validate();
  SetFamily family = options.family;
  if (route == Route::levelset) family = SetFamily::v_levels(Enlargement::level);
  family.validate();

  nlohmann::json recipe = {{"route", std::string(to_string(route))},
                           {"potential", spec},
                           {"witness", witness},
                           {"set_family", family},
                           {"baseline", options.base}};
  if (route == Route::main1 || route == Route::levelset) recipe["eps_grid"] = options.eps_grid;
  if (route == Route::general) {
    require(options.local_C > 0.0, "local constant must be positive");
    recipe["exact_chaining"] = options.exact_chaining;
    recipe["local_C"] = options.local_C;
  }

  RateFunction rate = rate_from_recipe(recipe);
  rate.set_class_tag(fit_class_small_s(rate));

  std::vector<std::string> unnormalized;
  if (options.base.unnormalized) unnormalized.emplace_back("baseline_C");
  if (route == Route::general) unnormalized.emplace_back("local_C");

  Certificate cert = make_certificate(std::move(rate), std::string(to_string(route)),
                                      std::move(unnormalized));
  const std::string wid = witness_id(witness);
  const DriftReport recheck = validate_witness(spec, witness, witness.validated_on.radius,
                                               2 * witness.validated_on.points - 1);
  const GeometryProfile profile = make_profile(spec, witness, family);
  cert.assumptions.push_back(make_assumption(
      "lyapunov_witness", wid, true,
      {{"witness", witness}, {"refined_grid_max_violation", real_to_json(recheck.max_violation)}}));
  cert.assumptions.push_back(make_assumption(
      "geometry_profile", family.describe(), true,
      {{"phi", std::string(to_string(profile.phi_provenance))},
       {"envelopes", std::string(to_string(profile.envelope_provenance))},
       {"r_min", real_to_json(profile.r_min)}}));
  cert.assumptions.push_back(make_assumption("baseline", options.base.describe(), true,
                                             {{"baseline", options.base}}));
  if (route == Route::general) {
    const LeadingTerm grad = leading_gradient(spec);
    cert.assumptions.push_back(make_assumption(
        "local_spi_gradient_floor", "potential", grad.coef > 0.0 && grad.degree >= 0.0,
        {{"leading_gradient_coef", grad.coef}, {"leading_gradient_degree", grad.degree}}));
  }
  cert.inputs = {wid};
  return cert;
}

Certificate certify_logdensity(const PotentialSpec& spec, const LogDensityOptions& o) {
  spec.validate();
  require(o.variant == 1 || o.variant == 2, "log-density variant must be 1 or 2");
  require(o.a0 > 0.0 && o.a0 < 1.0, "a0 must lie in (0, 1)");
  require(o.eta_coef > 0.0 && o.eta_power > 0.0, "eta needs positive coefficient and power");
  const int n = spec.dimension;
  auto eta = [&](double u) { return eta_power_value(o.eta_coef, o.eta_power, u); };

  // (1) V -> infinity.
  bool coercive = true;
  try {
    (void)lower_growth_envelope(spec);
  } catch (const Error&) {
    coercive = false;
  }

  // (2) (1 - a0)|grad V|^2 - Laplacian V >= eta(V) + b0 1_{|x| < R}.
  std::vector<Monomial> margin_terms;
  const auto terms = monomials(spec);
  for (const auto& [ci, di] : terms) {
    for (const auto& [cj, dj] : terms) {
      margin_terms.push_back({(1.0 - o.a0) * ci * di * cj * dj, di + dj - 2.0});
    }
    margin_terms.push_back({-ci * di * (di + n - 2.0), di - 2.0});
  }
  const LeadingTerm vlead = coercive ? leading_potential(spec) : LeadingTerm{};
  const Monomial eta_asym{o.eta_coef * std::pow(vlead.coef, o.eta_power), o.eta_power * vlead.degree};
  const LeadingTerm mlead = leading_term(margin_terms);
  bool tail_ok = coercive && mlead.coef > 0.0 &&
                 (mlead.degree > eta_asym.degree ||
                  (mlead.degree == eta_asym.degree && mlead.coef > eta_asym.coef));
  const double radius = o.check_radius > 0.0 ? o.check_radius
                                              : 4.0 * std::max(1.0, monotone_radius(spec));
  const auto rho = linspace(0.0, radius, 10001);
  double R = 0.0;
  double b0 = 0.0;
  std::vector<double> q(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const RadialJet jet = radial_jet(spec, rho[i]);
    q[i] = (1.0 - o.a0) * jet.d1 * jet.d1 - jet.laplacian(n) - eta(jet.f);
  }
  for (std::size_t i = rho.size(); i-- > 0;) {
    if (!(q[i] >= 0.0)) {
      R = i + 1 < rho.size() ? rho[i + 1] : kInf;
      break;
    }
  }
  for (std::size_t i = 0; i < rho.size() && rho[i] < R; ++i) b0 = std::min(b0, q[i]);
  const bool cond2 = tail_ok && std::isfinite(R) && std::isfinite(b0);

  // (3) limsup eta(V) / |grad V|^2 < infinity.
  const LeadingTerm glead = coercive ? leading_gradient(spec) : LeadingTerm{};
  const double grad2_degree = 2.0 * glead.degree;
  double limsup = kInf;
  if (coercive && glead.coef > 0.0) {
    if (eta_asym.degree < grad2_degree) {
      limsup = 0.0;
    } else if (eta_asym.degree == grad2_degree) {
      limsup = eta_asym.coef / (glead.coef * glead.coef);
    }
  }
  const bool cond3 = std::isfinite(limsup);
  if (!(coercive && cond2 && cond3)) {
    fail(ErrorCode::case_premise_unchecked,
         "log-density conditions fail for " + spec.describe() + " (coercive=" +
             std::to_string(coercive) + ", drift=" + std::to_string(cond2) +
             ", limsup=" + std::to_string(cond3) + ")");
  }

  nlohmann::json recipe = {{"route", "logdensity"},
                           {"potential", spec},
                           {"variant", o.variant},
                           {"eta", {{"coef", o.eta_coef}, {"power", o.eta_power}}},
                           {"a0", o.a0},
                           {"c", o.c},
                           {"C", o.C}};
  RateFunction rate = rate_from_recipe(recipe);
  rate.set_class_tag(fit_class_small_s(rate));
  Certificate cert = make_certificate(std::move(rate), "logdensity", {"c", "C"});
  cert.assumptions.push_back(make_assumption("potential_coercive", "potential", coercive));
  cert.assumptions.push_back(make_assumption(
      "drift_lower_bound", "potential", cond2,
      {{"a0", o.a0}, {"b0", real_to_json(b0)}, {"R", real_to_json(R)},
       {"grid_radius", radius}, {"leading_margin_degree", mlead.degree}}));
  cert.assumptions.push_back(make_assumption("eta_over_gradient_limsup", "potential", cond3,
                                             {{"limsup", real_to_json(limsup)}}));
  cert.assumptions.push_back(make_assumption(
      o.variant == 1 ? "gradient_envelope" : "hessian_envelope", "potential", true,
      {{"source", o.variant == 1 ? "gradient bound on the level shell"
                                 : "Hessian bound on the level shell"}}));
  return cert;
}

Certificate certify_distance(const PotentialSpec& spec, const DistanceOptions& o) {
  spec.validate();
  require(o.case_id >= 0 && o.case_id <= 4, "distance case must be 0 (auto) or 1 to 4");
  require(o.check_radius > 0.0, "check radius must be positive");
  const double c0 = global_curvature_lower_bound(spec);
  const double c0_box = curvature_lower_bound(spec, o.check_radius);
  // The global bound must sit below the sampled Hessian spectrum.
  double sampled_min = kInf;
  for (double rho : linspace(0.0, o.check_radius, o.check_points)) {
    sampled_min = std::min(sampled_min, radial_jet(spec, rho).hess_min_eig(spec.dimension));
  }
  const bool curvature_ok =
      std::isfinite(c0) && sampled_min >= c0 - kCurvatureSlack * std::max(1.0, std::abs(c0));

  GrowthEnvelope lower{};
  bool coercive = true;
  try {
    lower = lower_growth_envelope(spec);
  } catch (const Error&) {
    coercive = false;
  }
  const GrowthEnvelope upper = upper_growth_envelope(spec);
  const LeadingTerm vlead = coercive ? leading_potential(spec) : LeadingTerm{};
  const double b = lower.power;
  const double b_prime = std::max(upper.power, b);

  auto premises_for = [&](int case_id) {
    const double c0_used = (case_id == 3 || case_id == 4) ? std::min(c0, 0.0) : c0;
    const DriftReport growth = check_curvature_growth(spec, c0_used, o.check_radius, o.check_points);
    std::vector<Assumption> out;
    out.push_back(make_assumption("curvature_bound", "potential", curvature_ok,
                                  {{"c0", real_to_json(c0)}, {"c0_box", real_to_json(c0_box)},
                                   {"sampled_min", real_to_json(sampled_min)},
                                   {"c0_used", real_to_json(c0_used)}}));
    out.push_back(make_assumption("curvature_growth", "potential",
                                  growth.passed(kCurvatureGrowthTolerance),
                                  {{"max_violation", real_to_json(growth.max_violation)},
                                   {"radius", o.check_radius}}));
    if (case_id == 1 || case_id == 2) {
      out.push_back(make_assumption("c0_nonnegative", "potential", c0 >= 0.0));
    } else {
      out.push_back(make_assumption("c0_nonpositive", "potential", c0_used <= 0.0));
    }
    if (case_id == 3) {
      const bool dominant =
          coercive && (vlead.degree > 2.0 || (vlead.degree == 2.0 && vlead.coef > -c0_used / 2.0));
      out.push_back(make_assumption("quadratic_dominance", "potential", dominant,
                                    {{"leading_coef", vlead.coef}, {"leading_degree", vlead.degree}}));
    } else {
      out.push_back(make_assumption("lower_growth", "potential", coercive && b > 1.0,
                                    {{"b", b}, {"coef", lower.coef}, {"shift", lower.shift}}));
      if (case_id == 2 || case_id == 4) {
        out.push_back(make_assumption("upper_growth", "potential", b_prime >= b,
                                      {{"b_prime", b_prime}, {"coef", upper.coef}}));
      }
    }
    return out;
  };
  auto all_checked = [](const std::vector<Assumption>& as) {
    return std::all_of(as.begin(), as.end(), [](const Assumption& a) { return a.checked; });
  };

  int case_id = o.case_id;
  std::vector<Assumption> premises;
  if (case_id == 0) {
    for (int candidate : {3, 1, 2, 4}) {
      premises = premises_for(candidate);
      if (all_checked(premises)) {
        case_id = candidate;
        break;
      }
    }
    if (case_id == 0) {
      fail(ErrorCode::case_premise_unchecked,
           "no curvature case applies to " + spec.describe());
    }
  } else {
    premises = premises_for(case_id);
  }
  // Evaluating once enforces the premise check before anything is emitted.
  (void)log_beta_distance(case_id, case_id == 3 ? 2.0 : b, case_id == 3 ? 2.0 : b_prime, o.c, o.C,
                          1.0, premises);

  nlohmann::json recipe = {{"route", "distance"},
                           {"potential", spec},
                           {"case", case_id},
                           {"b", case_id == 3 ? 2.0 : b},
                           {"b_prime", case_id == 3 ? 2.0 : b_prime},
                           {"c", o.c},
                           {"C", o.C}};
  RateFunction rate = rate_from_recipe(recipe);
  rate.params()["case"] = case_id;
  rate.params()["c0"] = c0;
  if (case_id == 3) {
    rate.params().erase("b");
    rate.params().erase("b_prime");
  }
  Certificate cert = make_certificate(std::move(rate), "distance", {"c", "C"});
  cert.assumptions = std::move(premises);
  return cert;
}

Certificate classify(const Certificate& cert) {
  Certificate out = cert;
  if (cert.kind != CertificateKind::SPI) return out;
  const ClassTag& tag = cert.rate.class_tag();
  nlohmann::json detail = {{"class_tag", tag}};
  if (tag.kind == RateClass::exponential) {
    const double p = tag.exponent;
    if (std::abs(p - 1.0) <= kDlsiExponentTolerance) {
      out.kind = CertificateKind::DLSI;
      detail["rule"] = "exponential rate with exponent 1";
    } else if (p > 1.0) {
      out.kind = CertificateKind::FSob;
      const auto& params = cert.rate.params();
      const auto it = params.find("b");
      if (it != params.end() && it->second > 1.0 && it->second < 2.0 &&
          p == it->second / (2.0 * (it->second - 1.0))) {
        out.fsob_exponent = 2.0 * (1.0 - 1.0 / it->second);
        detail["rule"] = "exponential rate with exponent b / (2(b - 1))";
      } else {
        out.fsob_exponent = 1.0 / p;
        detail["rule"] = "exponential rate with exponent above 1";
      }
    } else {
      detail["rule"] = "unchanged";
    }
  } else if (tag.kind == RateClass::polynomial) {
    out.nash_type = true;
    detail["rule"] = "polynomial rate";
  } else {
    detail["rule"] = "unchanged";
  }
  out.assumptions.push_back(make_assumption("classification", "rate class tag", true, detail));
  return out;
}

void to_json(nlohmann::json& j, const Assumption& a) {
  j = nlohmann::json{{"name", a.name}, {"artifact", a.artifact}, {"checked", a.checked},
                     {"detail", a.detail}};
}

void from_json(const nlohmann::json& j, Assumption& a) {
  a.name = j.at("name").get<std::string>();
  a.artifact = j.at("artifact").get<std::string>();
  a.checked = j.at("checked").get<bool>();
  a.detail = j.value("detail", nlohmann::json::object());
}

namespace {

nlohmann::json certificate_body(const Certificate& cert) {
  nlohmann::json kind = {{"type", std::string(to_string(cert.kind))}, {"nash_type", cert.nash_type}};
  if (cert.c_ls) kind["C_LS"] = real_to_json(*cert.c_ls);
  if (cert.d_ls) kind["D_LS"] = real_to_json(*cert.d_ls);
  if (cert.fsob_exponent) kind["fsob_exponent"] = real_to_json(*cert.fsob_exponent);

  nlohmann::json log_beta = nlohmann::json::array();
  for (double v : cert.table.log_beta) log_beta.push_back(real_to_json(v));
  nlohmann::json rate = {{"class_tag", cert.rate.class_tag()},
                         {"params", params_to_json(cert.rate.params())},
                         {"validity", cert.rate.validity()},
                         {"recipe", cert.rate.recipe()},
                         {"table", {{"s", cert.table.s}, {"log_beta", log_beta}}}};

  nlohmann::json provenance = provenance_block(cert.config_hash);
  provenance["route"] = cert.route;
  provenance["inputs"] = cert.inputs;

  return {{"schema_version", kSchemaVersion},
          {"kind", kind},
          {"rate", rate},
          {"assumptions", cert.assumptions},
          {"provenance", provenance},
          {"unnormalized_constants", cert.unnormalized_constants}};
}

}  // namespace

std::string Certificate::id() const {
  return "cert:" + fnv1a_hex(canonical_dump(certificate_body(*this)));
}

nlohmann::json certificate_to_json(const Certificate& cert) {
  nlohmann::json j = certificate_body(cert);
  j["id"] = cert.id();
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      fail(ErrorCode::parse_error, "unsupported schema_version " + std::to_string(version));
    }
    Certificate cert;
    const auto& kind = j.at("kind");
    const std::string type = kind.at("type").get<std::string>();
    bool known = false;
    for (CertificateKind k : {CertificateKind::SPI, CertificateKind::DLSI, CertificateKind::LSI,
                              CertificateKind::FSob}) {
      if (to_string(k) == type) {
        cert.kind = k;
        known = true;
      }
    }
    if (!known) fail(ErrorCode::parse_error, "unknown certificate kind '" + type + "'");
    cert.nash_type = kind.at("nash_type").get<bool>();
    if (kind.contains("C_LS")) cert.c_ls = real_from_json(kind.at("C_LS"));
    if (kind.contains("D_LS")) cert.d_ls = real_from_json(kind.at("D_LS"));
    if (kind.contains("fsob_exponent")) cert.fsob_exponent = real_from_json(kind.at("fsob_exponent"));

    const auto& rate = j.at("rate");
    const auto tag = rate.at("class_tag").get<ClassTag>();
    const auto params = params_from_json(rate.at("params"));
    const auto validity = rate.at("validity").get<Validity>();
    const auto& recipe = rate.at("recipe");
    cert.table.s = rate.at("table").at("s").get<std::vector<double>>();
    for (const auto& v : rate.at("table").at("log_beta")) cert.table.log_beta.push_back(real_from_json(v));
    if (recipe.is_null()) {
      cert.rate = RateFunction::from_table(cert.table.s, cert.table.log_beta, validity, tag, params);
    } else {
      RateFunction rebuilt = rate_from_recipe(recipe);
      cert.rate = RateFunction(
          [rebuilt](double log_s) { return rebuilt.log_value(std::exp(log_s)); }, tag, params,
          validity, recipe);
    }

    cert.assumptions = j.at("assumptions").get<std::vector<Assumption>>();
    const auto& prov = j.at("provenance");
    cert.route = prov.at("route").get<std::string>();
    cert.inputs = prov.at("inputs").get<std::vector<std::string>>();
    cert.config_hash = prov.at("config_hash").get<std::string>();
    cert.unnormalized_constants = j.at("unnormalized_constants").get<std::vector<std::string>>();
    return cert;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace ineqforge
