#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ineqforge/certificates.hpp"
#include "ineqforge/lyapunov.hpp"
#include "ineqforge/potential.hpp"

namespace ineqforge {

/// One-dimensional finite-difference model of mu = e^{-V} dx / Z on [lo, hi]
/// with reflecting (Neumann) ends.
///
/// node_weights[i] = e^{-V(x_i)} h / Z_h sums to one; edge_weights[i] is
/// e^{-V(midpoint)} h / Z_h for the edge (x_i, x_{i+1}), so that
/// energy(f) = sum ((f_{i+1} - f_i) / h)^2 edge_weights[i].
struct DiscreteModel {
  std::vector<double> x;
  double h = 0.0;
  std::vector<double> node_weights;
  std::vector<double> edge_weights;
  std::optional<PotentialSpec> spec;

  [[nodiscard]] std::size_t size() const { return x.size(); }
};

inline constexpr std::size_t kMinModelPoints = 201;

/// Uniform grid of m points on [-L, L]. Needs n = 1 and tail mass beyond
/// L - 1 below 1e-10 (TailMassTooLarge otherwise).
DiscreteModel build_model(const PotentialSpec& spec, double L, std::size_t m);

/// Same construction for an arbitrary potential on [lo, hi]; no tail check.
DiscreteModel build_model(const std::function<double(double)>& potential, double lo, double hi,
                          std::size_t m);

enum class Functional { mean, second_moment, variance, entropy, l1, energy };

/// Entropy is Ent(f^2) with 0 log 0 = 0; second_moment is mu(f^2).
double functional(const DiscreteModel& model, std::span<const double> f, Functional kind);

struct SpectralGap {
  double gap = 0.0;                    // Sturm-sequence bisection
  double poincare_constant = 0.0;      // 1 / gap
  double inverse_iteration_gap = 0.0;  // independent cross-check
  int iterations = 0;
};

inline constexpr double kGapAgreement = 1e-6;

/// Smallest non-zero eigenvalue of the pencil (stiffness, mass). Throws
/// SolverFailure when the two strategies disagree by more than 1e-6
/// (relative) or inverse iteration does not converge.
SpectralGap spectral_gap(const DiscreteModel& model);

/// The k smallest eigenvalues of the pencil, ascending (k <= m).
std::vector<double> generator_eigenvalues(const DiscreteModel& model, std::size_t k);

struct BatteryFunction {
  std::string name;
  std::vector<double> values;
};

using TestBattery = std::vector<BatteryFunction>;

/// The constant 1; x^k times a Gaussian cutoff (k = 0..6); hats at five
/// centres; clipped exponentials; four smoothed indicators; the first eight
/// generator eigenvectors.
TestBattery make_battery(const DiscreteModel& model);

inline constexpr double kBatteryClip = 1e8;

struct EmpiricalValue {
  double value = 0.0;
  std::string witness_fn;
};

/// max over the battery of (mu(f^2) - s E(f, f))_+ / mu(|f|)^2.
EmpiricalValue empirical_beta(const DiscreteModel& model, const TestBattery& battery, double s);

/// max over members with positive energy of Ent(f^2) / E(f, f).
EmpiricalValue empirical_lsi(const DiscreteModel& model, const TestBattery& battery);

enum class CheckMode { absolute, shape_up_to_constant };
std::string_view to_string(CheckMode mode) noexcept;

struct Violation {
  double s = 0.0;
  double empirical = 0.0;
  double certified = 0.0;
  std::string witness_fn;
};

struct SoundnessReport {
  std::vector<double> s_grid;
  std::vector<double> empirical;
  std::vector<std::string> empirical_witness;
  std::vector<double> certified;
  std::vector<double> certified_log;
  std::vector<Violation> violations;
  CheckMode mode = CheckMode::absolute;
  std::optional<double> kappa;
  bool uninformative = false;

  [[nodiscard]] bool passed() const { return violations.empty(); }
};

inline constexpr double kDriftEnergyTolerance = 1e-3;

/// For every battery member: sum f^2 (-LW/W) w <= energy(f) (1 + tol), with
/// LW/W evaluated analytically at the nodes. The per-member left sides are
/// stored in `empirical` and the right sides in `certified`.
SoundnessReport check_drift_energy(const DiscreteModel& model, const PotentialSpec& spec,
                                   const WitnessParams& witness, const TestBattery& battery,
                                   double tol = kDriftEnergyTolerance);

/// Absolute mode needs a normalized certificate (ModeMismatch otherwise) and
/// flags every s with empirical beta above the certified rate. Shape mode
/// reports the smallest kappa >= 1 with kappa * rate >= empirical; with
/// `kappa_cap` set, points needing more than the cap are violations.
SoundnessReport check_certificate(const Certificate& cert, const DiscreteModel& model,
                                  const TestBattery& battery, std::span<const double> s_grid,
                                  CheckMode mode, std::optional<double> kappa_cap = std::nullopt);

/// 20 log-spaced points on [1e-2, 1].
std::vector<double> default_s_grid();

nlohmann::json report_to_json(const SoundnessReport& report, const std::string& config_hash = "");
std::string report_csv(const SoundnessReport& report);

}  // namespace ineqforge
