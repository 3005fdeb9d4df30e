#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ineqforge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double from, double to, std::size_t count);
std::vector<double> logspace(double from, double to, std::size_t count);

/// Smallest x in (lo, hi] with pred(x) true, assuming pred is monotone
/// (false ... false true ... true) and pred(hi) holds. Bisection runs until
/// lo and hi are adjacent doubles or max_iter is reached; the returned value
/// always satisfies pred.
double smallest_satisfying(const std::function<bool(double)>& pred, double lo, double hi,
                           int max_iter = 400);

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
Extremum golden_section_max(const std::function<double(double)>& f, double a, double b,
                            double x_tol = 1e-12, int max_iter = 200);

/// log(e^a + e^b) without overflow; -inf is the additive identity.
double log_add_exp(double a, double b) noexcept;

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Round up to the given number of significant digits.
double ceil_significant(double x, int digits);

/// Worker count honoring INEQFORGE_THREADS (falls back to hardware concurrency).
unsigned worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads. Each index
/// is handled exactly once; callers write into pre-sized slots so reductions
/// stay in index order and results are reproducible.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Parsed "from:to:steps[:log]" grid specification.
struct GridSpec {
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 0;
  bool log = false;

  [[nodiscard]] std::vector<double> points() const;
  [[nodiscard]] std::string to_string() const;
};

GridSpec parse_grid_spec(const std::string& text);

/// Formats with 17 significant digits; non-finite values as "inf"/"-inf"/"nan".
std::string format_g17(double value);

}  // namespace ineqforge
