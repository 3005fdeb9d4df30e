#include "ineqforge/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/json_io.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

constexpr int kCandidateHalvings = 6;
constexpr int kRoundUpDigits = 6;

bool singular_at_origin(const WitnessParams& p) {
  return p.family == WitnessFamily::exp_dist && p.b_exp < 2.0 && p.a > 0.0;
}

// Drift ratio with +inf in place of the singular origin value, so grid scans
// treat it as an unbounded supremum instead of aborting.
double drift_or_inf(const PotentialSpec& spec, const WitnessParams& p, double rho) {
  if (rho == 0.0 && singular_at_origin(p)) return kInf;
  return drift_ratio_radial(spec, p, rho);
}

double drift_d1_or_inf(const PotentialSpec& spec, const WitnessParams& p, double rho) {
  if (rho == 0.0 && singular_at_origin(p)) return kInf;
  return drift_ratio_radial_d1(spec, p, rho);
}

// Radial nodes with spacing h on [0, radius], plus the given extra radii.
std::vector<double> radial_nodes(double radius, double h, std::span<const double> extra) {
  const auto count = static_cast<std::size_t>(std::floor(radius / h)) + 1;
  std::vector<double> nodes;
  nodes.reserve(count + extra.size() + 1);
  for (std::size_t i = 0; i < count; ++i) nodes.push_back(h * static_cast<double>(i));
  if (nodes.back() < radius) nodes.push_back(radius);
  for (double r : extra) {
    if (r <= radius) nodes.push_back(r);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

// Leading asymptotic monomial of phi.
Monomial phi_asymptote(const PotentialSpec& spec, const PhiShape& phi) {
  if (phi.form == PhiForm::radius_power) return {phi.coef, phi.exponent};
  const LeadingTerm lead = leading_potential(spec);
  return {phi.coef * std::pow(lead.coef, phi.exponent), phi.exponent * lead.degree};
}

// LW/W + phi must have a negative leading term for the witness to hold
// beyond every finite grid.
bool tail_is_negative(const PotentialSpec& spec, const WitnessParams& params,
                      const PhiShape& phi) {
  const auto drift = drift_monomials(spec, params);
  const LeadingTerm d = leading_term(drift);
  const Monomial p = phi_asymptote(spec, phi);
  if (p.degree > d.degree) return false;
  if (p.degree < d.degree) return d.coef < 0.0;
  return d.coef + p.coef < 0.0;
}

struct NodeValues {
  std::vector<double> rho;
  std::vector<double> drift;
  std::vector<double> drift_d1;
};

NodeValues sample_drift(const PotentialSpec& spec, const WitnessParams& params,
                        std::vector<double> rho) {
  NodeValues out;
  out.drift.resize(rho.size());
  out.drift_d1.resize(rho.size());
  parallel_for(rho.size(), [&](std::size_t i) {
    out.drift[i] = drift_or_inf(spec, params, rho[i]);
    out.drift_d1[i] = drift_d1_or_inf(spec, params, rho[i]);
  });
  out.rho = std::move(rho);
  return out;
}

struct Attempt {
  bool accepted = false;
  double outside_max = -kInf;
  double b_const = 0.0;
};

Attempt try_radius(const PotentialSpec& spec, const PhiShape& phi, const NodeValues& nodes,
                   double r0, double h) {
  Attempt out;
  double inside_sup = -kInf;
  double slope = 0.0;
  for (std::size_t i = 0; i < nodes.rho.size(); ++i) {
    const double rho = nodes.rho[i];
    const double value = nodes.drift[i] + phi.at_radius(spec, rho);
    if (rho >= r0) {
      out.outside_max = std::max(out.outside_max, value);
    } else {
      inside_sup = std::max(inside_sup, value);
    }
    if (rho <= r0) {
      slope = std::max(slope, std::abs(nodes.drift_d1[i] + phi.derivative_at_radius(spec, rho)));
    }
  }
  if (!(out.outside_max <= 0.0)) return out;
  const double bound = inside_sup + 0.5 * h * slope;
  if (!std::isfinite(bound)) return out;
  out.b_const = ceil_significant(std::max(bound, 0.0), kRoundUpDigits);
  out.accepted = true;
  return out;
}

}  // namespace

void WitnessParams::validate() const {
  require(std::isfinite(a), "witness parameter a must be finite");
  if (family == WitnessFamily::exp_aV) {
    require(a >= 0.0 && a < 1.0, "exp_aV requires 0 < a < 1");
  } else {
    require(a >= 0.0, "exp_dist requires a > 0");
    require(b_exp > 1.0 && std::isfinite(b_exp), "exp_dist requires b_exp > 1");
  }
}

std::string WitnessParams::describe() const {
  std::ostringstream os;
  if (family == WitnessFamily::exp_aV) {
    os << "exp(" << a << " V)";
  } else {
    os << "exp(" << a << " |x|^" << b_exp << ")";
  }
  return os.str();
}

double PhiShape::at_radius(const PotentialSpec& spec, double rho) const {
  if (form == PhiForm::radius_power) {
    return exponent == 0.0 ? coef : coef * std::pow(rho, exponent);
  }
  const double v = std::max(radial_jet(spec, rho).f, 0.0);
  return exponent == 0.0 ? coef : coef * std::pow(v, exponent);
}

double PhiShape::derivative_at_radius(const PotentialSpec& spec, double rho) const {
  if (exponent == 0.0) return 0.0;
  if (form == PhiForm::radius_power) {
    if (rho == 0.0) return exponent < 1.0 ? kInf : (exponent == 1.0 ? coef : 0.0);
    return coef * exponent * std::pow(rho, exponent - 1.0);
  }
  const RadialJet jet = radial_jet(spec, rho);
  if (jet.d1 == 0.0) return 0.0;
  return coef * exponent * std::pow(std::max(jet.f, 0.0), exponent - 1.0) * jet.d1;
}

bool PhiShape::admissible_for(const PotentialSpec& spec) const {
  if (!(coef > 0.0) || !(exponent >= 0.0) || !std::isfinite(coef) || !std::isfinite(exponent)) {
    return false;
  }
  if (form == PhiForm::radius_power) return true;
  return !spec.is_flat() && spec.is_monotone_radial() && radial_jet(spec, 0.0).f >= 0.0;
}

std::string PhiShape::describe() const {
  std::ostringstream os;
  os << coef << (form == PhiForm::radius_power ? " |x|^" : " V^") << exponent;
  return os.str();
}

std::string LyapunovWitness::grade() const {
  return certificate_grade() ? "certificate" : "poincare_only";
}

double drift_ratio(const PotentialSpec& spec, const WitnessParams& params,
                   std::span<const double> x) {
  require(static_cast<int>(x.size()) == spec.dimension, "point dimension does not match spec");
  double rho2 = 0.0;
  for (double xi : x) {
    require(std::isfinite(xi), "evaluation point must be finite");
    rho2 += xi * xi;
  }
  return drift_ratio_radial(spec, params, std::sqrt(rho2));
}

double drift_ratio_radial(const PotentialSpec& spec, const WitnessParams& params, double rho) {
  if (params.a == 0.0) return 0.0;
  const int n = spec.dimension;
  const RadialJet jet = radial_jet(spec, rho);
  const double a = params.a;
  if (params.family == WitnessFamily::exp_aV) {
    return a * (jet.laplacian(n) - (1.0 - a) * jet.d1 * jet.d1);
  }
  const double b = params.b_exp;
  if (rho == 0.0) {
    if (b < 2.0) {
      fail(ErrorCode::singular_origin, "exp_dist drift ratio is singular at the origin for b_exp < 2");
    }
    return b == 2.0 ? 2.0 * a * n : 0.0;
  }
  const double psi = rho * jet.d1 - (n + b - 2.0 + a * b * std::pow(rho, b));
  return -a * b * std::pow(rho, b - 2.0) * psi;
}

double drift_ratio_radial_d1(const PotentialSpec& spec, const WitnessParams& params, double rho) {
  if (params.a == 0.0) return 0.0;
  const int n = spec.dimension;
  const RadialJet jet = radial_jet(spec, rho);
  const double a = params.a;
  if (params.family == WitnessFamily::exp_aV) {
    const double lap_d1 = n == 1 ? jet.d3 : jet.d3 + (n - 1) * jet.tangential_d1;
    return a * (lap_d1 - 2.0 * (1.0 - a) * jet.d1 * jet.d2);
  }
  const double b = params.b_exp;
  if (rho == 0.0) {
    if (b < 3.0) return kInf;
    return 0.0;
  }
  const double psi = rho * jet.d1 - (n + b - 2.0 + a * b * std::pow(rho, b));
  const double psi_d1 = jet.d1 + rho * jet.d2 - a * b * b * std::pow(rho, b - 1.0);
  return -a * b * ((b - 2.0) * std::pow(rho, b - 3.0) * psi + std::pow(rho, b - 2.0) * psi_d1);
}

std::vector<Monomial> drift_monomials(const PotentialSpec& spec, const WitnessParams& params) {
  const auto terms = monomials(spec);
  const double a = params.a;
  const double n = spec.dimension;
  std::vector<Monomial> out;
  if (a == 0.0) return out;
  if (params.family == WitnessFamily::exp_aV) {
    for (const auto& [c, d] : terms) out.push_back({a * c * d * (d + n - 2.0), d - 2.0});
    for (const auto& [ci, di] : terms) {
      for (const auto& [cj, dj] : terms) {
        out.push_back({-a * (1.0 - a) * ci * di * cj * dj, di + dj - 2.0});
      }
    }
    return out;
  }
  const double b = params.b_exp;
  for (const auto& [c, d] : terms) out.push_back({-a * b * c * d, d + b - 2.0});
  out.push_back({a * b * (n + b - 2.0), b - 2.0});
  out.push_back({a * a * b * b, 2.0 * b - 2.0});
  return out;
}

std::vector<double> WitnessSearch::radii() const {
  std::vector<double> out = r0_grid;
  if (out.empty()) {
    for (int k = 1; k <= 16; ++k) out.push_back(0.25 * k);
  }
  std::sort(out.begin(), out.end());
  for (double r : out) require(r > 0.0 && std::isfinite(r), "r0 candidates must be positive");
  return out;
}

std::vector<PhiShape> default_phi_candidates(const PotentialSpec& spec,
                                             const WitnessParams& params) {
  std::vector<PhiShape> out;
  const auto drift = drift_monomials(spec, params);
  const LeadingTerm lead = leading_term(drift);
  if (!(lead.coef < 0.0) || lead.degree < 0.0) return out;
  const double A = -lead.coef;
  const LeadingTerm v_lead = spec.is_flat() ? LeadingTerm{} : leading_potential(spec);
  for (int k = 1; k <= kCandidateHalvings; ++k) {
    const double c1 = A / std::ldexp(1.0, k);
    out.push_back(PhiShape::radius_power(c1, lead.degree));
    if (v_lead.coef > 0.0 && v_lead.degree > 0.0) {
      const double q = lead.degree / v_lead.degree;
      const PhiShape via_v = PhiShape::potential_power(c1 / std::pow(v_lead.coef, q), q);
      if (via_v.admissible_for(spec)) out.push_back(via_v);
    }
  }
  return out;
}

LyapunovWitness fit_witness(const PotentialSpec& spec, const WitnessParams& params,
                            const WitnessSearch& search) {
  spec.validate();
  params.validate();
  require(search.grid_points >= 3, "witness grid needs at least 3 points");
  require(search.radius_factor >= 1.0, "radius_factor must be at least 1");
  const auto radii = search.radii();
  const auto candidates =
      search.candidates.empty() ? default_phi_candidates(spec, params) : search.candidates;
  if (candidates.empty()) {
    fail(ErrorCode::no_witness_found,
         "drift ratio of " + params.describe() + " is not eventually negative for " +
             spec.describe());
  }

  const double radius = search.radius_factor * radii.back();
  const double h = 2.0 * radius / static_cast<double>(search.grid_points - 1);
  const NodeValues nodes = sample_drift(spec, params, radial_nodes(radius, h, radii));
  const ValidationDomain domain{radius, h, nodes.rho.size()};

  for (const auto& phi : candidates) {
    if (!phi.admissible_for(spec) || !tail_is_negative(spec, params, phi)) continue;
    for (double r0 : radii) {
      const Attempt attempt = try_radius(spec, phi, nodes, r0, h);
      if (!attempt.accepted) continue;
      const double phi0 = phi.at_radius(spec, r0);
      if (!(phi0 > 0.0)) continue;
      return LyapunovWitness{params, phi, phi0, attempt.b_const, r0, domain};
    }
  }
  std::string reason = singular_at_origin(params) ? " (drift ratio is singular at the origin)" : "";
  fail(ErrorCode::no_witness_found,
       "no candidate phi validates " + params.describe() + " for " + spec.describe() + reason);
}

DriftReport validate_witness(const PotentialSpec& spec, const LyapunovWitness& witness,
                             double radius, std::size_t points) {
  require(radius > 0.0 && points >= 2, "validation grid needs radius > 0 and 2 points");
  const double h = radius / static_cast<double>(points - 1);
  const double extra[] = {witness.r0};
  const NodeValues nodes = sample_drift(spec, witness.params, radial_nodes(radius, h, extra));
  DriftReport report;
  report.max_violation = -kInf;
  for (std::size_t i = 0; i < nodes.rho.size(); ++i) {
    const double rho = nodes.rho[i];
    double value = nodes.drift[i] + witness.phi.at_radius(spec, rho);
    if (rho < witness.r0) value -= witness.b_const;
    report.max_violation = std::max(report.max_violation, value);
  }
  report.witness = witness;
  report.grid = {radius, h, nodes.rho.size()};
  return report;
}

DriftReport check_curvature_growth(const PotentialSpec& spec, double c0, double radius,
                                   std::size_t points) {
  require(radius > 0.0 && points >= 2, "curvature grid needs radius > 0 and 2 points");
  const auto rho = linspace(0.0, radius, points);
  const double v0 = radial_jet(spec, 0.0).f;
  std::vector<double> gaps(points);
  parallel_for(points, [&](std::size_t i) {
    const RadialJet jet = radial_jet(spec, rho[i]);
    const double lhs = rho[i] == 0.0 ? 0.0 : rho[i] * jet.d1;
    const double rhs = jet.f - v0 + 0.5 * c0 * rho[i] * rho[i];
    gaps[i] = rhs - lhs;
  });
  DriftReport report;
  report.max_violation = *std::max_element(gaps.begin(), gaps.end());
  report.grid = {radius, radius / static_cast<double>(points - 1), points};
  return report;
}

void to_json(nlohmann::json& j, const WitnessParams& params) {
  j = nlohmann::json::object();
  j["a"] = params.a;
  if (params.family == WitnessFamily::exp_aV) {
    j["family"] = "exp_aV";
  } else {
    j["family"] = "exp_dist";
    j["b_exp"] = params.b_exp;
  }
}

void from_json(const nlohmann::json& j, WitnessParams& params) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "exp_aV") {
    params = WitnessParams::exp_aV(j.at("a").get<double>());
  } else if (family == "exp_dist") {
    params = WitnessParams::exp_dist(j.at("a").get<double>(), j.at("b_exp").get<double>());
  } else {
    fail(ErrorCode::parse_error, "unknown witness family '" + family + "'");
  }
  params.validate();
}

void to_json(nlohmann::json& j, const PhiShape& phi) {
  j = nlohmann::json{{"form", phi.form == PhiForm::radius_power ? "radius_power" : "potential_power"},
                     {"coef", phi.coef},
                     {"exponent", phi.exponent}};
}

void from_json(const nlohmann::json& j, PhiShape& phi) {
  const std::string form = j.at("form").get<std::string>();
  if (form == "radius_power") {
    phi.form = PhiForm::radius_power;
  } else if (form == "potential_power") {
    phi.form = PhiForm::potential_power;
  } else {
    fail(ErrorCode::parse_error, "unknown phi form '" + form + "'");
  }
  phi.coef = j.at("coef").get<double>();
  phi.exponent = j.at("exponent").get<double>();
}

void to_json(nlohmann::json& j, const LyapunovWitness& witness) {
  j = nlohmann::json::object();
  j["params"] = witness.params;
  j["phi"] = witness.phi;
  j["phi0"] = witness.phi0;
  j["b_const"] = witness.b_const;
  j["r0"] = witness.r0;
  j["grade"] = witness.grade();
  j["validated_on"] = {{"radius", witness.validated_on.radius},
                       {"step", witness.validated_on.step},
                       {"points", witness.validated_on.points}};
}

void from_json(const nlohmann::json& j, LyapunovWitness& witness) {
  try {
    witness.params = j.at("params").get<WitnessParams>();
    witness.phi = j.at("phi").get<PhiShape>();
    witness.phi0 = j.at("phi0").get<double>();
    witness.b_const = j.at("b_const").get<double>();
    witness.r0 = j.at("r0").get<double>();
    const auto& dom = j.at("validated_on");
    witness.validated_on = {dom.at("radius").get<double>(), dom.at("step").get<double>(),
                            dom.at("points").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed witness: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const DriftReport& report) {
  j = nlohmann::json::object();
  j["max_violation"] = real_to_json(report.max_violation);
  j["grid"] = {{"radius", report.grid.radius},
               {"step", report.grid.step},
               {"points", report.grid.points}};
  if (report.witness) j["witness"] = *report.witness;
}

}  // namespace ineqforge
