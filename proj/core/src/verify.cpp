#include "ineqforge/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ineqforge/errors.hpp"
#include "ineqforge/json_io.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

constexpr int kBisectionIterations = 400;
constexpr int kMaxInverseIterations = 20000;
constexpr double kRayleighTolerance = 1e-14;
constexpr std::size_t kBatteryEigenvectors = 8;

DiscreteModel assemble(std::vector<double> x, const std::function<double(double)>& potential) {
  const std::size_t m = x.size();
  DiscreteModel model;
  model.h = (x.back() - x.front()) / static_cast<double>(m - 1);
  std::vector<double> v_node(m), v_edge(m - 1);
  for (std::size_t i = 0; i < m; ++i) v_node[i] = potential(x[i]);
  for (std::size_t i = 0; i + 1 < m; ++i) v_edge[i] = potential(0.5 * (x[i] + x[i + 1]));
  const double v_min = std::min(*std::min_element(v_node.begin(), v_node.end()),
                                *std::min_element(v_edge.begin(), v_edge.end()));
  require(std::isfinite(v_min), "potential must be finite on the model grid");

  model.node_weights.resize(m);
  model.edge_weights.resize(m - 1);
  for (std::size_t i = 0; i < m; ++i) model.node_weights[i] = std::exp(-(v_node[i] - v_min)) * model.h;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    model.edge_weights[i] = std::exp(-(v_edge[i] - v_min)) * model.h;
  }
  const double z = std::accumulate(model.node_weights.begin(), model.node_weights.end(), 0.0);
  for (double& w : model.node_weights) w /= z;
  for (double& e : model.edge_weights) e /= z;
  const bool positive =
      std::all_of(model.node_weights.begin(), model.node_weights.end(), [](double w) { return w > 0.0; }) &&
      std::all_of(model.edge_weights.begin(), model.edge_weights.end(), [](double w) { return w > 0.0; });
  require(positive, "model weights underflow; shrink the domain");
  model.x = std::move(x);
  return model;
}

// Symmetric tridiagonal form A = W^{-1/2} K W^{-1/2} of the pencil.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;      // A(i, i + 1)
  std::vector<double> off_sq;   // off^2, computed without forming huge products
};

Tridiagonal pencil_matrix(const DiscreteModel& model) {
  const std::size_t m = model.size();
  const auto& w = model.node_weights;
  std::vector<double> k(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) k[i] = model.edge_weights[i] / (model.h * model.h);
  Tridiagonal t;
  t.diag.resize(m);
  t.off.resize(m - 1);
  t.off_sq.resize(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = i > 0 ? k[i - 1] : 0.0;
    const double right = i + 1 < m ? k[i] : 0.0;
    t.diag[i] = (left + right) / w[i];
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    t.off[i] = -k[i] / std::sqrt(w[i] * w[i + 1]);
    t.off_sq[i] = (k[i] / w[i]) * (k[i] / w[i + 1]);
  }
  return t;
}

// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
std::size_t count_below(const Tridiagonal& t, double x) {
  constexpr double tiny = 1e-300;
  std::size_t count = 0;
  double q = t.diag[0] - x;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    if (i + 1 == t.diag.size()) break;
    q = t.diag[i + 1] - x - t.off_sq[i] / q;
  }
  return count;
}

double gershgorin_upper(const Tridiagonal& t) {
  double hi = 0.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double left = i > 0 ? std::abs(t.off[i - 1]) : 0.0;
    const double right = i < t.off.size() ? std::abs(t.off[i]) : 0.0;
    hi = std::max(hi, t.diag[i] + left + right);
  }
  return hi;
}

// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double bisect_eigenvalue(const Tridiagonal& t, std::size_t k, double upper) {
  double lo = -1.0;
  double hi = upper;
  for (int it = 0; it < kBisectionIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(t, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> multiply(const Tridiagonal& t, std::span<const double> y) {
  const std::size_t m = y.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double v = t.diag[i] * y[i];
    if (i > 0) v += t.off[i - 1] * y[i - 1];
    if (i + 1 < m) v += t.off[i] * y[i + 1];
    out[i] = v;
  }
  return out;
}

// Solves (A - shift I) y = rhs by the Thomas algorithm.
std::vector<double> solve_shifted(const Tridiagonal& t, double shift, std::span<const double> rhs) {
  const std::size_t m = rhs.size();
  std::vector<double> c(m, 0.0), d(m);
  double pivot = t.diag[0] - shift;
  if (pivot == 0.0) pivot = 1e-300;
  if (m > 1) c[0] = t.off[0] / pivot;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < m; ++i) {
    pivot = t.diag[i] - shift - t.off[i - 1] * c[i - 1];
    if (pivot == 0.0) pivot = 1e-300;
    if (i + 1 < m) c[i] = t.off[i] / pivot;
    d[i] = (rhs[i] - t.off[i - 1] * d[i - 1]) / pivot;
  }
  std::vector<double> y(m);
  y[m - 1] = d[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) y[i] = d[i] - c[i] * y[i + 1];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double norm = std::sqrt(dot(v, v));
  for (double& x : v) x /= norm;
}

// Eigenvector of A for an eigenvalue known to bisection accuracy.
std::vector<double> eigenvector(const Tridiagonal& t, double lambda, std::span<const double> start) {
  const double shift = lambda - 1e-10 * std::max(1.0, std::abs(lambda));
  std::vector<double> y(start.begin(), start.end());
  normalize(y);
  for (int it = 0; it < 4; ++it) {
    y = solve_shifted(t, shift, y);
    normalize(y);
  }
  return y;
}

struct Moments {
  double second = 0.0;   // mu(f^2)
  double l1 = 0.0;       // mu(|f|)
  double energy = 0.0;
  double entropy = 0.0;  // Ent(f^2)
};

Moments moments(const DiscreteModel& model, std::span<const double> f) {
  Moments out;
  out.second = functional(model, f, Functional::second_moment);
  out.l1 = functional(model, f, Functional::l1);
  out.energy = functional(model, f, Functional::energy);
  out.entropy = functional(model, f, Functional::entropy);
  return out;
}

std::vector<Moments> battery_moments(const DiscreteModel& model, const TestBattery& battery) {
  std::vector<Moments> out(battery.size());
  parallel_for(battery.size(), [&](std::size_t i) { out[i] = moments(model, battery[i].values); });
  return out;
}

EmpiricalValue beta_from_moments(const TestBattery& battery, const std::vector<Moments>& mom, double s) {
  EmpiricalValue best{0.0, ""};
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const double value = std::max(0.0, mom[i].second - s * mom[i].energy) / (mom[i].l1 * mom[i].l1);
    if (best.witness_fn.empty() || value > best.value) best = {value, battery[i].name};
  }
  return best;
}

}  // namespace

DiscreteModel build_model(const PotentialSpec& spec, double L, std::size_t m) {
  spec.validate();
  require(spec.dimension == 1, "the discrete model is one-dimensional");
  require(L > 1.0 && std::isfinite(L), "model half-width must exceed 1");
  require(m >= kMinModelPoints, "model needs at least 201 points");
  // Mirror the grid so symmetric potentials give exactly symmetric weights.
  std::vector<double> x = linspace(-L, L, m);
  for (std::size_t i = 0; i < m / 2; ++i) x[m - 1 - i] = -x[i];
  if (m % 2 == 1) x[m / 2] = 0.0;
  auto potential = [&](double xi) { return radial_jet(spec, std::abs(xi)).f; };
  DiscreteModel model = assemble(std::move(x), potential);

  double v_min = kInf;
  for (double xi : model.x) v_min = std::min(v_min, potential(xi));
  const double z = std::exp(-v_min) * model.h *
                   std::accumulate(model.x.begin(), model.x.end(), 0.0, [&](double acc, double xi) {
                     return acc + std::exp(-(potential(xi) - v_min));
                   });
  check_tail_mass(spec, L, z);
  model.spec = spec;
  return model;
}

DiscreteModel build_model(const std::function<double(double)>& potential, double lo, double hi,
                          std::size_t m) {
  require(hi > lo && std::isfinite(lo) && std::isfinite(hi), "model interval must be finite");
  require(m >= kMinModelPoints, "model needs at least 201 points");
  return assemble(linspace(lo, hi, m), potential);
}

double functional(const DiscreteModel& model, std::span<const double> f, Functional kind) {
  require(f.size() == model.size(), "function and model grid sizes differ");
  const auto& w = model.node_weights;
  switch (kind) {
    case Functional::mean: return dot(w, f);
    case Functional::second_moment: {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * f[i];
      return s;
    }
    case Functional::variance: {
      const double mean = dot(w, f);
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * (f[i] - mean) * (f[i] - mean);
      return s;
    }
    case Functional::entropy: {
      double mass = 0.0;
      double plogp = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double g = f[i] * f[i];
        mass += w[i] * g;
        if (g > 0.0) plogp += w[i] * g * std::log(g);
      }
      return mass > 0.0 ? plogp - mass * std::log(mass) : 0.0;
    }
    case Functional::l1: {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::abs(f[i]);
      return s;
    }
    case Functional::energy: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double slope = (f[i + 1] - f[i]) / model.h;
        s += slope * slope * model.edge_weights[i];
      }
      return s;
    }
  }
  return 0.0;
}

std::vector<double> generator_eigenvalues(const DiscreteModel& model, std::size_t k) {
  require(k <= model.size(), "cannot request more eigenvalues than grid points");
  const Tridiagonal t = pencil_matrix(model);
  const double upper = gershgorin_upper(t);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = bisect_eigenvalue(t, i, upper);
  return out;
}

SpectralGap spectral_gap(const DiscreteModel& model) {
  const Tridiagonal t = pencil_matrix(model);
  SpectralGap out;
  out.gap = bisect_eigenvalue(t, 1, gershgorin_upper(t));
  out.poincare_constant = 1.0 / out.gap;

  // Inverse iteration on A + I restricted to the complement of the kernel,
  // which is spanned by sqrt(w).
  const std::size_t m = model.size();
  std::vector<double> kernel(m);
  for (std::size_t i = 0; i < m; ++i) kernel[i] = std::sqrt(model.node_weights[i]);
  normalize(kernel);
  auto deflate = [&](std::vector<double>& v) {
    const double c = dot(v, kernel);
    for (std::size_t i = 0; i < m; ++i) v[i] -= c * kernel[i];
  };
  const double centre = 0.5 * (model.x.front() + model.x.back());
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = model.x[i] - centre;
    y[i] = kernel[i] * (z + 0.1 * z * z);
  }
  deflate(y);
  normalize(y);
  double lambda = kInf;
  bool converged = false;
  for (int it = 1; it <= kMaxInverseIterations; ++it) {
    y = solve_shifted(t, -1.0, y);
    deflate(y);
    normalize(y);
    const double next = dot(y, multiply(t, y));
    out.iterations = it;
    if (std::abs(next - lambda) <= kRayleighTolerance * std::max(1.0, std::abs(next))) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  out.inverse_iteration_gap = lambda;
  if (!converged) fail(ErrorCode::solver_failure, "inverse iteration did not converge");
  if (std::abs(out.inverse_iteration_gap - out.gap) > kGapAgreement * out.gap) {
    fail(ErrorCode::solver_failure,
         "eigensolvers disagree: bisection " + format_g17(out.gap) + ", inverse iteration " +
             format_g17(out.inverse_iteration_gap));
  }
  return out;
}

TestBattery make_battery(const DiscreteModel& model) {
  const auto& x = model.x;
  const std::size_t m = x.size();
  const double centre = 0.5 * (x.front() + x.back());
  const double half = 0.5 * (x.back() - x.front());
  TestBattery battery;
  auto add = [&](std::string name, auto&& fn) {
    BatteryFunction f{std::move(name), std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) {
      f.values[i] = std::clamp(fn(x[i] - centre), -kBatteryClip, kBatteryClip);
    }
    battery.push_back(std::move(f));
  };

  add("const", [](double) { return 1.0; });
  const double cutoff = half / 2.0;
  for (int k = 0; k <= 6; ++k) {
    add("poly" + std::to_string(k),
        [=](double z) { return std::pow(z / cutoff, k) * std::exp(-(z / cutoff) * (z / cutoff)); });
  }
  const auto centres = linspace(-half / 4.0, half / 4.0, 5);
  for (std::size_t j = 0; j < centres.size(); ++j) {
    const double c = centres[j];
    const double width = half / 16.0;
    add("hat" + std::to_string(j), [=](double z) { return std::max(0.0, 1.0 - std::abs(z - c) / width); });
  }
  for (double lambda : {0.25, -0.25, 0.5, -0.5, 1.0, -1.0}) {
    add("exp" + format_g17(lambda), [=](double z) { return std::exp(lambda * z); });
  }
  const std::array<std::pair<double, double>, 4> intervals = {
      {{-half / 2.0, 0.0}, {0.0, half / 2.0}, {-half / 4.0, half / 4.0}, {-half / 8.0, half / 8.0}}};
  const double smoothing = half / 64.0;
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    const auto [a, b] = intervals[j];
    add("ind" + std::to_string(j), [=](double z) {
      return 0.5 * (std::tanh((z - a) / smoothing) - std::tanh((z - b) / smoothing));
    });
  }

  const Tridiagonal t = pencil_matrix(model);
  const double upper = gershgorin_upper(t);
  std::vector<double> start(m);
  for (std::size_t i = 0; i < m; ++i) start[i] = 1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + 0.5);
  const std::size_t count = std::min(kBatteryEigenvectors, m);
  for (std::size_t k = 0; k < count; ++k) {
    const auto y = eigenvector(t, bisect_eigenvalue(t, k, upper), start);
    std::vector<double> f(m);
    double peak = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      f[i] = y[i] / std::sqrt(model.node_weights[i]);
      peak = std::max(peak, std::abs(f[i]));
    }
    for (double& v : f) v = std::clamp(v / peak, -kBatteryClip, kBatteryClip);
    battery.push_back({"eig" + std::to_string(k), std::move(f)});
  }

  for (const auto& f : battery) {
    const bool finite = std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
    const bool nonzero = std::any_of(f.values.begin(), f.values.end(), [](double v) { return v != 0.0; });
    if (!finite || !nonzero) fail(ErrorCode::solver_failure, "battery member " + f.name + " is degenerate");
  }
  return battery;
}

EmpiricalValue empirical_beta(const DiscreteModel& model, const TestBattery& battery, double s) {
  require(s > 0.0, "empirical_beta needs s > 0");
  require(!battery.empty(), "empirical_beta needs a non-empty battery");
  return beta_from_moments(battery, battery_moments(model, battery), s);
}

EmpiricalValue empirical_lsi(const DiscreteModel& model, const TestBattery& battery) {
  const auto mom = battery_moments(model, battery);
  EmpiricalValue best{0.0, ""};
  for (std::size_t i = 0; i < battery.size(); ++i) {
    // Energies at round-off level belong to numerically constant members.
    if (!(mom[i].energy > 1e-10 * mom[i].second)) continue;
    const double ratio = mom[i].entropy / mom[i].energy;
    if (best.witness_fn.empty() || ratio > best.value) best = {ratio, battery[i].name};
  }
  require(!best.witness_fn.empty(), "empirical_lsi needs a battery member with positive energy");
  return best;
}

std::string_view to_string(CheckMode mode) noexcept {
  return mode == CheckMode::absolute ? "absolute" : "shape_up_to_constant";
}

SoundnessReport check_drift_energy(const DiscreteModel& model, const PotentialSpec& spec,
                                   const WitnessParams& witness, const TestBattery& battery,
                                   double tol) {
  require(tol >= 0.0, "drift-energy tolerance must be non-negative");
  witness.validate();
  const std::size_t m = model.size();
  std::vector<double> minus_ratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = model.x[i];
    minus_ratio[i] = -drift_ratio(spec, witness, std::span<const double>(&xi, 1));
  }
  SoundnessReport report;
  report.mode = CheckMode::absolute;
  report.empirical.resize(battery.size());
  report.certified.resize(battery.size());
  report.certified_log.resize(battery.size());
  parallel_for(battery.size(), [&](std::size_t k) {
    const auto& f = battery[k].values;
    double lhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) lhs += f[i] * f[i] * minus_ratio[i] * model.node_weights[i];
    const double rhs = functional(model, f, Functional::energy) * (1.0 + tol);
    report.empirical[k] = lhs;
    report.certified[k] = rhs;
    report.certified_log[k] = rhs > 0.0 ? std::log(rhs) : -kInf;
  });
  for (std::size_t k = 0; k < battery.size(); ++k) {
    report.empirical_witness.push_back(battery[k].name);
    if (report.empirical[k] > report.certified[k]) {
      report.violations.push_back({0.0, report.empirical[k], report.certified[k], battery[k].name});
    }
  }
  return report;
}

SoundnessReport check_certificate(const Certificate& cert, const DiscreteModel& model,
                                  const TestBattery& battery, std::span<const double> s_grid,
                                  CheckMode mode, std::optional<double> kappa_cap) {
  require(cert.kind == CertificateKind::SPI || cert.kind == CertificateKind::DLSI,
          "soundness checks apply to SPI and DLSI certificates");
  require(!s_grid.empty(), "soundness check needs a non-empty s grid");
  require(std::all_of(s_grid.begin(), s_grid.end(), [](double s) { return s > 0.0; }),
          "s grid must be strictly positive");
  if (mode == CheckMode::absolute && !cert.normalized()) {
    fail(ErrorCode::mode_mismatch,
         "absolute mode needs a normalized certificate; this one leaves constants unnormalized");
  }
  if (kappa_cap) require(*kappa_cap >= 1.0, "kappa cap must be at least 1");

  const auto mom = battery_moments(model, battery);
  SoundnessReport report;
  report.mode = mode;
  report.s_grid.assign(s_grid.begin(), s_grid.end());
  const std::size_t count = s_grid.size();
  report.empirical.resize(count);
  report.empirical_witness.resize(count);
  report.certified.resize(count);
  report.certified_log.resize(count);
  parallel_for(count, [&](std::size_t i) {
    const EmpiricalValue emp = beta_from_moments(battery, mom, s_grid[i]);
    report.empirical[i] = emp.value;
    report.empirical_witness[i] = emp.witness_fn;
    report.certified_log[i] = cert.rate.log_value(s_grid[i]);
    report.certified[i] = std::exp(report.certified_log[i]);
  });
  report.uninformative = std::all_of(report.certified_log.begin(), report.certified_log.end(),
                                     [](double v) { return v == kInf; });

  auto excess = [&](std::size_t i) {
    const double gap = std::log(report.empirical[i]) - report.certified_log[i];
    return std::isnan(gap) ? -kInf : gap;
  };
  auto slack = [&](std::size_t i) { return 1e-12 * std::max(1.0, std::abs(report.certified_log[i])); };
  auto flag = [&](std::size_t i) {
    report.violations.push_back({s_grid[i], report.empirical[i], report.certified[i],
                                 report.empirical_witness[i]});
  };

  if (mode == CheckMode::absolute) {
    for (std::size_t i = 0; i < count; ++i) {
      if (excess(i) > slack(i)) flag(i);
    }
    return report;
  }
  double needed = 0.0;
  for (std::size_t i = 0; i < count; ++i) needed = std::max(needed, excess(i));
  report.kappa = std::exp(needed);
  for (std::size_t i = 0; i < count; ++i) {
    const double limit = kappa_cap ? std::log(*kappa_cap) : kInf;
    if (excess(i) == kInf || excess(i) > limit + slack(i)) flag(i);
  }
  return report;
}

std::vector<double> default_s_grid() { return logspace(1e-2, 1.0, 20); }

nlohmann::json report_to_json(const SoundnessReport& report, const std::string& config_hash) {
  auto reals = [](const std::vector<double>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(real_to_json(x));
    return out;
  };
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"s", real_to_json(v.s)},
                          {"emp", real_to_json(v.empirical)},
                          {"cert", real_to_json(v.certified)},
                          {"witness_fn", v.witness_fn}});
  }
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"s_grid", reals(report.s_grid)},
                      {"empirical", reals(report.empirical)},
                      {"empirical_witness", report.empirical_witness},
                      {"certified", reals(report.certified)},
                      {"certified_log", reals(report.certified_log)},
                      {"violations", violations},
                      {"mode", std::string(to_string(report.mode))},
                      {"uninformative", report.uninformative},
                      {"passed", report.passed()},
                      {"provenance", provenance_block(config_hash)}};
  if (report.kappa) j["kappa"] = real_to_json(*report.kappa);
  return j;
}

std::string report_csv(const SoundnessReport& report) {
  std::string out = "s,empirical,certified,witness_fn\n";
  for (std::size_t i = 0; i < report.empirical.size(); ++i) {
    const double s = i < report.s_grid.size() ? report.s_grid[i] : std::nan("");
    out += format_g17(s) + "," + format_g17(report.empirical[i]) + "," +
           format_g17(report.certified[i]) + "," + report.empirical_witness[i] + "\n";
  }
  return out;
}

}  // namespace ineqforge
