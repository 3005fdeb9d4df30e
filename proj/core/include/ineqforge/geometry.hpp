#pragma once

#include <functional>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ineqforge/lyapunov.hpp"
#include "ineqforge/potential.hpp"

namespace ineqforge {

/// Exhausting family A_r of compact sets:
///   balls     A_r = B(o, r)
///   v_levels  A_r = {V < r}
///   h_levels  A_r = {V + c0 |x|^2 / 2 < r}
/// The enlargement is either the metric 2-neighbourhood (bounded by the ball
/// of radius outer(A_r) + 2) or, for v_levels only, the level set {V < r + 2}.
enum class SetKind { balls, v_levels, h_levels };
enum class Enlargement { metric, level };

struct SetFamily {
  SetKind kind = SetKind::balls;
  Enlargement enlargement = Enlargement::metric;
  double c0 = 0.0;  // only used by h_levels

  static SetFamily balls() { return {}; }
  static SetFamily v_levels(Enlargement e = Enlargement::metric) {
    return {SetKind::v_levels, e, 0.0};
  }
  static SetFamily h_levels(double c0) { return {SetKind::h_levels, Enlargement::metric, c0}; }

  void validate() const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const SetFamily&, const SetFamily&) = default;
};

enum class ValueProvenance { exact_by_monotonicity, grid_with_margin };
std::string_view to_string(ValueProvenance p) noexcept;

struct EnvelopeValues {
  double g = 0.0;  // sup |V| over the enlarged set
  double G = 0.0;  // sup |grad V|^2 over the enlarged set
  double H = 0.0;  // oscillation of V over the enlarged set
};

/// Evaluators for the envelope quantities of a set family. The callables are
/// plain values so tests can assemble stub profiles directly.
struct GeometryProfile {
  std::function<double(double)> phi_of_r;
  std::function<double(double)> g_of_r;
  std::function<double(double)> G_of_r;
  std::function<double(double)> H_of_r;
  /// Smallest r for which A_r contains B(o, r0); route formulas clamp to it.
  double r_min = 0.0;
  /// Largest radius searched by phi_inverse.
  double r_max = 1e12;
  ValueProvenance phi_provenance = ValueProvenance::exact_by_monotonicity;
  ValueProvenance envelope_provenance = ValueProvenance::exact_by_monotonicity;
  std::string description;

  [[nodiscard]] double phi_inverse(double y) const;
  [[nodiscard]] double admissible(double r) const { return r < r_min ? r_min : r; }
};

/// inf over the complement of A_r of phi. Throws UnboundedBelow when the set
/// family does not exhaust R^n or phi is not admissible.
double phi_inf(const PotentialSpec& spec, const LyapunovWitness& witness, const SetFamily& family,
               double r);

/// Generalized inverse inf{s >= 0 : Phi(s) >= y}; +inf when Phi stays below
/// y on [0, r_max].
double phi_inverse(const GeometryProfile& profile, double y);

/// g, G and H over the enlargement of A_r.
EnvelopeValues envelope_profile(const PotentialSpec& spec, const SetFamily& family, double r);

GeometryProfile make_profile(const PotentialSpec& spec, const LyapunovWitness& witness,
                             const SetFamily& family);

/// Radius r_c(r) = inf{|x| : x outside A_r}; a lower bound when the set
/// function is not monotone.
double complement_inner_radius(const PotentialSpec& spec, const SetFamily& family, double r);
/// Radius bounding A_r from outside.
double outer_radius(const PotentialSpec& spec, const SetFamily& family, double r);

/// CSV with header r,phi,g,G,H and 17 significant digits.
std::string profile_csv(const GeometryProfile& profile, std::span<const double> radii);

void to_json(nlohmann::json& j, const SetFamily& family);
void from_json(const nlohmann::json& j, SetFamily& family);

}  // namespace ineqforge
