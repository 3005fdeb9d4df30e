#include "ineqforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ineqforge/errors.hpp"
#include "ineqforge/numeric.hpp"

namespace ineqforge {
namespace {

constexpr std::size_t kGridNodes = 4001;
constexpr int kMaxDoublings = 2100;

// Radial set function s(rho) whose sublevel sets {s < r} are the family A_r.
class SetFunction {
 public:
  SetFunction(const PotentialSpec& spec, const SetFamily& family) : ball_(family.kind == SetKind::balls) {
    family.validate();
    if (ball_) {
      terms_ = {{1.0, 1.0}};
    } else {
      std::map<double, double> merged;
      for (const auto& [c, d] : monomials(spec)) merged[d] += c;
      if (family.kind == SetKind::h_levels) merged[2.0] += 0.5 * family.c0;
      for (const auto& [d, c] : merged) {
        if (c != 0.0) terms_.push_back({c, d});
      }
      offset_ = radial_jet(spec, 0.0).f;
    }
    const LeadingTerm lead = leading_term(terms_);
    if (!(lead.coef > 0.0 && lead.degree > 0.0)) {
      fail(ErrorCode::unbounded_below,
           "set family " + family.describe() + " does not exhaust R^n for " + spec.describe());
    }
    rm_ = monotone_radius(terms_);
    if (rm_ > 0.0) {
      step_ = rm_ / static_cast<double>(kGridNodes - 1);
      margin_ = step_ * slope_bound(rm_);
      nodes_ = linspace(0.0, rm_, kGridNodes);
      values_.resize(kGridNodes);
      for (std::size_t i = 0; i < kGridNodes; ++i) values_[i] = value(nodes_[i]);
    }
  }

  [[nodiscard]] bool monotone() const { return rm_ == 0.0; }

  [[nodiscard]] double value(double rho) const { return offset_ + eval_monomials(terms_, rho); }

  [[nodiscard]] double inner_radius(double r) const {
    if (ball_) return std::max(r, 0.0);
    if (value(0.0) >= r) return 0.0;
    if (!monotone()) {
      // s < r on every cell before the first node where s + margin reaches r.
      for (std::size_t i = 0; i < kGridNodes; ++i) {
        if (values_[i] + margin_ >= r) return nodes_[i];
      }
    }
    return crossing(r, rm_);
  }

  [[nodiscard]] double outer_radius(double r) const {
    if (ball_) return std::max(r, 0.0);
    if (monotone()) return value(0.0) >= r ? 0.0 : crossing(r, 0.0);
    return value(rm_) < r ? crossing(r, rm_) : rm_;
  }

  /// Smallest r with inner_radius(r) >= r0.
  [[nodiscard]] double admissible_level(double r0) const {
    if (ball_) return r0;
    if (monotone()) return value(r0);
    double hi = offset_ + margin_ + 1.0;
    for (const auto& [c, d] : terms_) hi += std::abs(c) * std::pow(r0, d);
    const double lo = value(0.0) - 1.0;
    return smallest_satisfying([&](double r) { return inner_radius(r) >= r0; }, lo, hi);
  }

 private:
  [[nodiscard]] double slope_bound(double radius) const {
    double bound = 0.0;
    for (const auto& [c, d] : terms_) bound += std::abs(c) * d * std::pow(radius, d - 1.0);
    return bound;
  }

  // Smallest rho >= from with s(rho) >= r, where s is increasing on [from, inf).
  [[nodiscard]] double crossing(double r, double from) const {
    double hi = std::max(1.0, 2.0 * from);
    for (int k = 0; k < kMaxDoublings && value(hi) < r; ++k) hi *= 2.0;
    if (value(hi) < r) return kInf;
    return smallest_satisfying([&](double rho) { return value(rho) >= r; }, from, hi);
  }

  bool ball_;
  std::vector<Monomial> terms_;
  double offset_ = 0.0;
  double rm_ = 0.0;
  double step_ = 0.0;
  double margin_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

struct BallExtrema {
  double sup_abs = 0.0;
  double sup = 0.0;
  double inf = 0.0;
  double sup_grad2 = 0.0;
};

// Extrema of the radial profile of V over balls B(o, R). Exact beyond the
// monotone radius (profile and slope both increase there); grid with a
// Lipschitz margin inside it. Prefix extrema over a fixed grid keep the
// result monotone in R.
class RadialExtrema {
 public:
  explicit RadialExtrema(const PotentialSpec& spec) : spec_(spec), rm_(monotone_radius(spec)) {
    if (rm_ == 0.0) return;
    const double h = rm_ / static_cast<double>(kGridNodes - 1);
    const double grad = gradient_bound(spec, rm_);
    margin_f_ = 0.5 * h * grad;
    margin_g2_ = h * grad * hessian_bound(spec, 0.0, rm_);
    nodes_ = linspace(0.0, rm_, kGridNodes);
    prefix_.resize(kGridNodes);
    BallExtrema acc{0.0, -kInf, kInf, 0.0};
    for (std::size_t i = 0; i < kGridNodes; ++i) {
      acc = merge(acc, at(nodes_[i]));
      prefix_[i] = acc;
    }
  }

  [[nodiscard]] bool exact() const { return rm_ == 0.0; }

  [[nodiscard]] BallExtrema over_ball(double R) const {
    if (exact()) return merge(at(0.0), at(R));
    BallExtrema out;
    if (R >= rm_) {
      out = prefix_.back();
    } else {
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), R);
      out = prefix_[static_cast<std::size_t>(it - nodes_.begin()) - 1];
    }
    out.sup_abs += margin_f_;
    out.sup += margin_f_;
    out.inf -= margin_f_;
    out.sup_grad2 += margin_g2_;
    return merge(out, at(R));
  }

 private:
  [[nodiscard]] BallExtrema at(double rho) const {
    const RadialJet jet = radial_jet(spec_, rho);
    return {std::abs(jet.f), jet.f, jet.f, jet.d1 * jet.d1};
  }

  static BallExtrema merge(const BallExtrema& a, const BallExtrema& b) {
    return {std::max(a.sup_abs, b.sup_abs), std::max(a.sup, b.sup), std::min(a.inf, b.inf),
            std::max(a.sup_grad2, b.sup_grad2)};
  }

  PotentialSpec spec_;
  double rm_;
  double margin_f_ = 0.0;
  double margin_g2_ = 0.0;
  std::vector<double> nodes_;
  std::vector<BallExtrema> prefix_;
};

EnvelopeValues envelope_from(const SetFunction& sets, const RadialExtrema& extrema,
                             const SetFamily& family, double r, const PotentialSpec& spec) {
  if (family.enlargement == Enlargement::metric) {
    const BallExtrema e = extrema.over_ball(sets.outer_radius(r) + 2.0);
    return {e.sup_abs, e.sup_grad2, e.sup - e.inf};
  }
  const double level = r + 2.0;
  const BallExtrema e = extrema.over_ball(sets.outer_radius(level));
  const double floor = std::min(e.inf, radial_jet(spec, 0.0).f);
  return {std::max(std::abs(level), std::abs(floor)), e.sup_grad2, level - floor};
}

void check_phi(const PotentialSpec& spec, const LyapunovWitness& witness) {
  if (!witness.phi.admissible_for(spec)) {
    fail(ErrorCode::unbounded_below,
         "phi " + witness.phi.describe() + " is not a non-decreasing radial shape for " +
             spec.describe());
  }
}

}  // namespace

void SetFamily::validate() const {
  require(std::isfinite(c0), "set family c0 must be finite");
  require(enlargement == Enlargement::metric || kind == SetKind::v_levels,
          "level enlargement is only defined for v_levels");
}

std::string SetFamily::describe() const {
  std::ostringstream os;
  switch (kind) {
    case SetKind::balls: os << "balls"; break;
    case SetKind::v_levels: os << "v_levels"; break;
    case SetKind::h_levels: os << "h_levels(c0=" << c0 << ")"; break;
  }
  os << (enlargement == Enlargement::metric ? "/metric" : "/level");
  return os.str();
}

std::string_view to_string(ValueProvenance p) noexcept {
  return p == ValueProvenance::exact_by_monotonicity ? "exact_by_monotonicity"
                                                     : "grid_with_margin";
}

double GeometryProfile::phi_inverse(double y) const {
  if (std::isnan(y) || y == kInf) return kInf;
  if (phi_of_r(0.0) >= y) return 0.0;
  double hi = 1.0;
  while (phi_of_r(hi) < y && hi < r_max) hi = std::min(2.0 * hi, r_max);
  if (phi_of_r(hi) < y) return kInf;
  return smallest_satisfying([&](double r) { return phi_of_r(r) >= y; }, 0.0, hi);
}

double phi_inverse(const GeometryProfile& profile, double y) {
  require(!(y < 0.0), "phi_inverse needs y >= 0");
  return profile.phi_inverse(y);
}

double complement_inner_radius(const PotentialSpec& spec, const SetFamily& family, double r) {
  return SetFunction(spec, family).inner_radius(r);
}

double outer_radius(const PotentialSpec& spec, const SetFamily& family, double r) {
  return SetFunction(spec, family).outer_radius(r);
}

double phi_inf(const PotentialSpec& spec, const LyapunovWitness& witness, const SetFamily& family,
               double r) {
  require(r > 0.0, "phi_inf needs r > 0");
  check_phi(spec, witness);
  const SetFunction sets(spec, family);
  return witness.phi.at_radius(spec, sets.inner_radius(r));
}

EnvelopeValues envelope_profile(const PotentialSpec& spec, const SetFamily& family, double r) {
  require(r > 0.0, "envelope_profile needs r > 0");
  return envelope_from(SetFunction(spec, family), RadialExtrema(spec), family, r, spec);
}

GeometryProfile make_profile(const PotentialSpec& spec, const LyapunovWitness& witness,
                             const SetFamily& family) {
  check_phi(spec, witness);
  struct State {
    PotentialSpec spec;
    LyapunovWitness witness;
    SetFamily family;
    SetFunction sets;
    RadialExtrema extrema;
  };
  auto state = std::make_shared<const State>(
      State{spec, witness, family, SetFunction(spec, family), RadialExtrema(spec)});

  GeometryProfile profile;
  profile.phi_of_r = [state](double r) {
    return state->witness.phi.at_radius(state->spec, state->sets.inner_radius(r));
  };
  profile.g_of_r = [state](double r) {
    return envelope_from(state->sets, state->extrema, state->family, r, state->spec).g;
  };
  profile.G_of_r = [state](double r) {
    return envelope_from(state->sets, state->extrema, state->family, r, state->spec).G;
  };
  profile.H_of_r = [state](double r) {
    return envelope_from(state->sets, state->extrema, state->family, r, state->spec).H;
  };
  profile.r_min = state->sets.admissible_level(witness.r0);
  profile.phi_provenance = state->sets.monotone() ? ValueProvenance::exact_by_monotonicity
                                                  : ValueProvenance::grid_with_margin;
  profile.envelope_provenance = state->sets.monotone() && state->extrema.exact()
                                    ? ValueProvenance::exact_by_monotonicity
                                    : ValueProvenance::grid_with_margin;
  profile.description = family.describe() + " for " + spec.describe();
  return profile;
}

std::string profile_csv(const GeometryProfile& profile, std::span<const double> radii) {
  std::ostringstream os;
  os << "r,phi,g,G,H\n";
  for (double r : radii) {
    os << format_g17(r) << ',' << format_g17(profile.phi_of_r(r)) << ','
       << format_g17(profile.g_of_r(r)) << ',' << format_g17(profile.G_of_r(r)) << ','
       << format_g17(profile.H_of_r(r)) << '\n';
  }
  return os.str();
}

void to_json(nlohmann::json& j, const SetFamily& family) {
  static constexpr const char* kinds[] = {"balls", "v_levels", "h_levels"};
  j = nlohmann::json{{"kind", kinds[static_cast<int>(family.kind)]},
                     {"enlargement", family.enlargement == Enlargement::metric ? "metric" : "level"}};
  if (family.kind == SetKind::h_levels) j["c0"] = family.c0;
}

void from_json(const nlohmann::json& j, SetFamily& family) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "balls") {
      family.kind = SetKind::balls;
    } else if (kind == "v_levels") {
      family.kind = SetKind::v_levels;
    } else if (kind == "h_levels") {
      family.kind = SetKind::h_levels;
    } else {
      fail(ErrorCode::parse_error, "unknown set family '" + kind + "'");
    }
    const std::string enl = j.value("enlargement", std::string("metric"));
    if (enl != "metric" && enl != "level") fail(ErrorCode::parse_error, "unknown enlargement '" + enl + "'");
    family.enlargement = enl == "metric" ? Enlargement::metric : Enlargement::level;
    family.c0 = j.value("c0", 0.0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("malformed set family: ") + e.what());
  }
  family.validate();
}

}  // namespace ineqforge
