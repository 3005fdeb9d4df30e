#include "ineqforge/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

constexpr double kTailFraction = 1e-10;
constexpr int kCurvatureGridPoints = 10001;

// rho^e with the limits at rho = 0.
double pow_limit(double rho, double e) {
  if (rho > 0.0) return std::pow(rho, e);
  if (e > 0.0) return 0.0;
  if (e == 0.0) return 1.0;
  return kInf;
}

// factor * rho^e, where a vanishing factor wins over an infinite power.
double term(double factor, double rho, double e) {
  if (factor == 0.0) return 0.0;
  return factor * pow_limit(rho, e);
}

void collect_monomials(const PotentialSpec& spec, std::vector<Monomial>& out) {
  switch (spec.family) {
    case PotentialFamily::gaussian:
      out.push_back({spec.c, 2.0});
      break;
    case PotentialFamily::power:
      out.push_back({spec.c, spec.b_pow});
      break;
    case PotentialFamily::double_well:
      out.push_back({spec.a4, 4.0});
      if (spec.a2 != 0.0) out.push_back({-spec.a2, 2.0});
      break;
    case PotentialFamily::sum:
      for (const auto& t : spec.terms) collect_monomials(t, out);
      break;
  }
}

// Offsets of nested terms contribute to the total additive constant.
double total_offset(const PotentialSpec& spec) {
  double off = spec.offset;
  if (spec.family == PotentialFamily::sum) {
    for (const auto& t : spec.terms) off += total_offset(t);
  }
  return off;
}

double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace

PotentialSpec PotentialSpec::gaussian(double c, int n) {
  PotentialSpec s;
  s.family = PotentialFamily::gaussian;
  s.c = c;
  s.dimension = n;
  s.validate();
  return s;
}

PotentialSpec PotentialSpec::power(double c, double b_pow, int n) {
  PotentialSpec s;
  s.family = PotentialFamily::power;
  s.c = c;
  s.b_pow = b_pow;
  s.dimension = n;
  s.validate();
  return s;
}

PotentialSpec PotentialSpec::double_well(double a4, double a2, int n) {
  PotentialSpec s;
  s.family = PotentialFamily::double_well;
  s.a4 = a4;
  s.a2 = a2;
  s.dimension = n;
  s.validate();
  return s;
}

PotentialSpec PotentialSpec::sum(std::vector<PotentialSpec> terms, int n) {
  PotentialSpec s;
  s.family = PotentialFamily::sum;
  s.terms = std::move(terms);
  s.dimension = n;
  s.validate();
  return s;
}

PotentialSpec PotentialSpec::flat(double level, int n) { return sum({}, n).with_offset(level); }

PotentialSpec PotentialSpec::with_offset(double value) const {
  PotentialSpec s = *this;
  s.offset = value;
  return s;
}

void PotentialSpec::validate() const {
  require(dimension >= 1, "dimension must be a positive integer");
  require(std::isfinite(offset), "offset must be finite");
  switch (family) {
    case PotentialFamily::gaussian:
      require(c > 0.0 && std::isfinite(c), "gaussian requires c > 0");
      break;
    case PotentialFamily::power:
      require(c > 0.0 && std::isfinite(c), "power requires c > 0");
      require(b_pow > 1.0 && std::isfinite(b_pow), "power requires b_pow > 1");
      break;
    case PotentialFamily::double_well:
      require(a4 > 0.0 && std::isfinite(a4), "double_well requires a4 > 0");
      require(std::isfinite(a2), "double_well requires finite a2");
      break;
    case PotentialFamily::sum:
      for (const auto& t : terms) {
        require(t.dimension == dimension, "sum terms must share the dimension of the sum");
        t.validate();
      }
      break;
  }
}

bool PotentialSpec::is_flat() const {
  if (family != PotentialFamily::sum) return false;
  return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.is_flat(); });
}

bool PotentialSpec::is_monotone_radial() const {
  switch (family) {
    case PotentialFamily::gaussian:
    case PotentialFamily::power:
      return true;
    case PotentialFamily::double_well:
      return a2 <= 0.0;
    case PotentialFamily::sum:
      return std::all_of(terms.begin(), terms.end(),
                         [](const auto& t) { return t.is_monotone_radial(); });
  }
  return false;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  switch (family) {
    case PotentialFamily::gaussian: os << "gaussian(c=" << c << ")"; break;
    case PotentialFamily::power: os << "power(c=" << c << ", b=" << b_pow << ")"; break;
    case PotentialFamily::double_well:
      os << "double_well(a4=" << a4 << ", a2=" << a2 << ")";
      break;
    case PotentialFamily::sum: {
      os << "sum(";
      for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? ", " : "") << terms[i].describe();
      os << ")";
      break;
    }
  }
  if (offset != 0.0) os << "+" << offset;
  os << " on R^" << dimension;
  return os.str();
}

std::vector<Monomial> monomials(const PotentialSpec& spec) {
  std::vector<Monomial> out;
  collect_monomials(spec, out);
  return out;
}

double RadialJet::laplacian(int n) const {
  return n == 1 ? d2 : d2 + static_cast<double>(n - 1) * tangential;
}

double RadialJet::hess_min_eig(int n) const { return n == 1 ? d2 : std::min(d2, tangential); }

RadialJet radial_jet(const PotentialSpec& spec, double rho) {
  RadialJet jet;
  jet.f = total_offset(spec);
  for (const auto& [c, d] : monomials(spec)) {
    jet.f += term(c, rho, d);
    jet.d1 += term(c * d, rho, d - 1.0);
    jet.d2 += term(c * d * (d - 1.0), rho, d - 2.0);
    jet.d3 += term(c * d * (d - 1.0) * (d - 2.0), rho, d - 3.0);
    jet.tangential += term(c * d, rho, d - 2.0);
    jet.tangential_d1 += term(c * d * (d - 2.0), rho, d - 3.0);
  }
  return jet;
}

EvalResult eval(const PotentialSpec& spec, std::span<const double> x) {
  require(static_cast<int>(x.size()) == spec.dimension, "point dimension does not match spec");
  double rho2 = 0.0;
  for (double xi : x) {
    require(std::isfinite(xi), "evaluation point must be finite");
    rho2 += xi * xi;
  }
  const double rho = std::sqrt(rho2);
  const RadialJet jet = radial_jet(spec, rho);
  EvalResult out;
  out.v = jet.f;
  out.grad.assign(x.size(), 0.0);
  if (rho > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) out.grad[i] = jet.d1 * x[i] / rho;
  }
  out.hess_min_eig = jet.hess_min_eig(spec.dimension);
  return out;
}

GrowthEnvelope lower_growth_envelope(const PotentialSpec& spec) {
  const auto terms = monomials(spec);
  if (terms.empty()) fail(ErrorCode::non_integrable, "flat potential: " + spec.describe());
  return lower_growth_envelope(std::span<const Monomial>(terms));
}

GrowthEnvelope lower_growth_envelope(std::span<const Monomial> terms) {
  double top = -kInf;
  for (const auto& t : terms) {
    if (t.coef > 0.0) top = std::max(top, t.degree);
  }
  if (top <= 0.0) fail(ErrorCode::non_integrable, "radial profile has no growing term");
  double lead = 0.0;
  std::vector<Monomial> negatives;
  for (const auto& t : terms) {
    if (t.coef > 0.0 && t.degree == top) lead += t.coef;
    if (t.coef < 0.0) {
      if (t.degree >= top) {
        fail(ErrorCode::non_integrable, "negative term dominates the radial profile");
      }
      negatives.push_back(t);
    }
  }
  GrowthEnvelope env{lead, top, 0.0};
  if (negatives.empty()) return env;
  // Young: |c| rho^d <= eps rho^p + (p-d)/p |c| (|c| d / (eps p))^{d/(p-d)}.
  const double eps = 0.5 * lead / static_cast<double>(negatives.size());
  for (const auto& t : negatives) {
    const double a = -t.coef;
    const double d = t.degree;
    const double p = top;
    env.shift += (p - d) / p * a * std::pow(a * d / (eps * p), d / (p - d));
  }
  env.coef = 0.5 * lead;
  return env;
}

GrowthEnvelope upper_growth_envelope(const PotentialSpec& spec) {
  const auto terms = monomials(spec);
  GrowthEnvelope env{0.0, 0.0, 0.0};
  for (const auto& t : terms) {
    if (t.coef > 0.0) env.power = std::max(env.power, t.degree);
  }
  for (const auto& t : terms) {
    if (t.coef <= 0.0) continue;
    env.coef += t.coef;
    if (t.degree < env.power) env.shift += t.coef;  // rho^d <= rho^p + 1
  }
  return env;
}

double tail_mass_bound(const PotentialSpec& spec, double R) {
  const GrowthEnvelope env = lower_growth_envelope(spec);
  const int n = spec.dimension;
  const double a = static_cast<double>(n) / env.power;
  const double x = env.coef * std::pow(std::max(R, 0.0), env.power);
  const double radial = boost::math::tgamma(a, x) / (env.power * std::pow(env.coef, a));
  return std::exp(env.shift - total_offset(spec)) * unit_sphere_area(n) * radial;
}

void check_tail_mass(const PotentialSpec& spec, double L, double Z) {
  const double tail = tail_mass_bound(spec, L - 1.0);
  if (!(tail <= kTailFraction * Z)) {
    std::ostringstream os;
    os << "tail mass bound " << tail << " beyond radius " << (L - 1.0) << " exceeds "
       << kTailFraction << " * Z = " << kTailFraction * Z << " for " << spec.describe();
    fail(ErrorCode::tail_mass_too_large, os.str());
  }
}

double normalizing_constant(const PotentialSpec& spec, double L, int m) {
  spec.validate();
  if (spec.is_flat()) fail(ErrorCode::non_integrable, "flat potential has infinite mass");
  require(spec.dimension <= 2, "tensor quadrature supports n <= 2");
  require(L > 1.0 && m >= 3, "normalizing_constant needs L > 1 and m >= 3");
  const auto xs = linspace(-L, L, static_cast<std::size_t>(m));
  const double h = 2.0 * L / static_cast<double>(m - 1);
  auto weight = [m](int i) { return (i == 0 || i == m - 1) ? 0.5 : 1.0; };
  double Z = 0.0;
  if (spec.dimension == 1) {
    for (int i = 0; i < m; ++i) Z += weight(i) * std::exp(-radial_jet(spec, std::abs(xs[i])).f);
    Z *= h;
  } else {
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < m; ++j) {
        const double rho = std::hypot(xs[i], xs[j]);
        row += weight(j) * std::exp(-radial_jet(spec, rho).f);
      }
      Z += weight(i) * row;
    }
    Z *= h * h;
  }
  check_tail_mass(spec, L, Z);
  return Z;
}

double curvature_lower_bound(const PotentialSpec& spec, double R) {
  require(R > 0.0, "curvature_lower_bound needs R > 0");
  const int n = spec.dimension;
  const double rmax = R * std::sqrt(static_cast<double>(n));
  switch (spec.family) {
    case PotentialFamily::gaussian:
      return 2.0 * spec.c;
    case PotentialFamily::power: {
      // Both Hessian eigenvalues scale as rho^{b-2}: the infimum over the box
      // sits at the origin (b >= 2) or at the far corner (b < 2).
      const double rho = spec.b_pow >= 2.0 ? 0.0 : rmax;
      return radial_jet(spec, rho).hess_min_eig(n);
    }
    case PotentialFamily::sum: {
      // Radial Hessians share an eigenbasis, so eigenvalues add.
      double total = 0.0;
      for (const auto& t : spec.terms) total += curvature_lower_bound(t, R);
      return total;
    }
    case PotentialFamily::double_well:
      break;
  }
  // Smallest eigenvalue is 12 a4 rho^2 - 2 a2 (n = 1) or 4 a4 rho^2 - 2 a2;
  // its rho-derivative is bounded by 24 a4 rho on [0, rmax].
  const auto rhos = linspace(0.0, rmax, kCurvatureGridPoints);
  const double h = rmax / static_cast<double>(kCurvatureGridPoints - 1);
  const double lip = 24.0 * spec.a4 * rmax;
  double inf = kInf;
  for (double rho : rhos) inf = std::min(inf, radial_jet(spec, rho).hess_min_eig(n));
  return inf - 0.5 * h * lip;
}

double global_curvature_lower_bound(const PotentialSpec& spec) {
  switch (spec.family) {
    case PotentialFamily::gaussian:
      return 2.0 * spec.c;
    case PotentialFamily::power:
      return spec.b_pow == 2.0 ? 2.0 * spec.c : 0.0;
    case PotentialFamily::double_well:
      return -2.0 * spec.a2;
    case PotentialFamily::sum: {
      double total = 0.0;
      for (const auto& t : spec.terms) total += global_curvature_lower_bound(t);
      return total;
    }
  }
  return -kInf;
}

double gradient_bound(const PotentialSpec& spec, double rho) {
  double bound = 0.0;
  for (const auto& [c, d] : monomials(spec)) bound += std::abs(c) * d * pow_limit(rho, d - 1.0);
  return bound;
}

double hessian_bound(const PotentialSpec& spec, double rho_lo, double rho_hi) {
  double bound = 0.0;
  for (const auto& [c, d] : monomials(spec)) {
    const double scale = std::abs(c) * d * std::max(1.0, std::abs(d - 1.0));
    const double rho = d >= 2.0 ? rho_hi : rho_lo;
    bound += term(scale, rho, d - 2.0);
  }
  return bound;
}

double monotone_radius(const PotentialSpec& spec) {
  const auto terms = monomials(spec);
  return monotone_radius(std::span<const Monomial>(terms));
}

double monotone_radius(std::span<const Monomial> terms) {
  double lead_deg = -kInf, lead_coef = 0.0, neg_weight = 0.0, neg_deg = -kInf;
  for (const auto& t : terms) {
    if (t.coef > 0.0) lead_deg = std::max(lead_deg, t.degree);
  }
  for (const auto& t : terms) {
    if (t.coef > 0.0 && t.degree == lead_deg) lead_coef += t.coef * t.degree;
    if (t.coef < 0.0) {
      neg_weight += -t.coef * t.degree;
      neg_deg = std::max(neg_deg, t.degree);
    }
  }
  if (neg_weight == 0.0) return 0.0;
  if (lead_coef <= 0.0 || neg_deg >= lead_deg) return kInf;
  return std::max(1.0, std::pow(neg_weight / lead_coef, 1.0 / (lead_deg - neg_deg)));
}

double eval_monomials(std::span<const Monomial> terms, double rho) {
  double v = 0.0;
  for (const auto& [c, d] : terms) v += term(c, rho, d);
  return v;
}

double eval_monomials_d1(std::span<const Monomial> terms, double rho) {
  double v = 0.0;
  for (const auto& [c, d] : terms) v += term(c * d, rho, d - 1.0);
  return v;
}

ShellBracket level_shell(const PotentialSpec& spec, double u) {
  const double level = u - total_offset(spec);
  const GrowthEnvelope lo_env = lower_growth_envelope(spec);
  const GrowthEnvelope hi_env = upper_growth_envelope(spec);
  ShellBracket out;
  out.hi = std::pow(std::max(level + lo_env.shift, 0.0) / lo_env.coef, 1.0 / lo_env.power);
  const double inner = level - hi_env.shift;
  out.lo = inner > 0.0 ? std::pow(inner / hi_env.coef, 1.0 / hi_env.power) : 0.0;
  out.lo = std::min(out.lo, out.hi);
  return out;
}

LeadingTerm leading_term(std::span<const Monomial> terms) {
  std::map<double, double> by_degree;
  for (const auto& t : terms) by_degree[t.degree] += t.coef;
  for (auto it = by_degree.rbegin(); it != by_degree.rend(); ++it) {
    if (it->second != 0.0) return {it->second, it->first};
  }
  return {0.0, 0.0};
}

LeadingTerm leading_potential(const PotentialSpec& spec) {
  const auto terms = monomials(spec);
  return leading_term(terms);
}

LeadingTerm leading_gradient(const PotentialSpec& spec) {
  std::vector<Monomial> d;
  for (const auto& [c, deg] : monomials(spec)) d.push_back({c * deg, deg - 1.0});
  return leading_term(d);
}

LeadingTerm leading_laplacian(const PotentialSpec& spec) {
  const double n = spec.dimension;
  std::vector<Monomial> d;
  for (const auto& [c, deg] : monomials(spec)) d.push_back({c * deg * (deg + n - 2.0), deg - 2.0});
  return leading_term(d);
}

void to_json(nlohmann::json& j, const PotentialSpec& spec) {
  j = nlohmann::json::object();
  j["n"] = spec.dimension;
  j["offset"] = spec.offset;
  switch (spec.family) {
    case PotentialFamily::gaussian:
      j["family"] = "gaussian";
      j["c"] = spec.c;
      break;
    case PotentialFamily::power:
      j["family"] = "power";
      j["c"] = spec.c;
      j["b_pow"] = spec.b_pow;
      break;
    case PotentialFamily::double_well:
      j["family"] = "double_well";
      j["a4"] = spec.a4;
      j["a2"] = spec.a2;
      break;
    case PotentialFamily::sum:
      j["family"] = "sum";
      j["terms"] = spec.terms;
      break;
  }
}

void from_json(const nlohmann::json& j, PotentialSpec& spec) {
  try {
    spec = PotentialSpec{};
    spec.dimension = j.value("n", 1);
    spec.offset = j.value("offset", 0.0);
    const std::string family = j.at("family").get<std::string>();
    if (family == "gaussian") {
      spec.family = PotentialFamily::gaussian;
      spec.c = j.at("c").get<double>();
    } else if (family == "power") {
      spec.family = PotentialFamily::power;
      spec.c = j.at("c").get<double>();
      spec.b_pow = j.at("b_pow").get<double>();
    } else if (family == "double_well") {
      spec.family = PotentialFamily::double_well;
      spec.a4 = j.at("a4").get<double>();
      spec.a2 = j.at("a2").get<double>();
    } else if (family == "sum") {
      spec.family = PotentialFamily::sum;
      spec.terms = j.at("terms").get<std::vector<PotentialSpec>>();
    } else {
      fail(ErrorCode::parse_error, "unknown potential family '" + family + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed potential: ") + e.what());
  }
  spec.validate();
}

}  // namespace ineqforge
