#include "ineqforge/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "ineqforge/errors.hpp"

namespace ineqforge {

std::vector<double> linspace(double from, double to, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = from;
    return out;
  }
  const double step = (to - from) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = from + step * static_cast<double>(i);
  out.back() = to;
  return out;
}

std::vector<double> logspace(double from, double to, std::size_t count) {
  require(from > 0.0 && to > 0.0, "logspace endpoints must be positive");
  auto exps = linspace(std::log(from), std::log(to), count);
  std::vector<double> out(count);
  std::transform(exps.begin(), exps.end(), out.begin(), [](double e) { return std::exp(e); });
  if (count > 0) {
    out.front() = from;
    out.back() = to;
  }
  return out;
}

double smallest_satisfying(const std::function<bool(double)>& pred, double lo, double hi,
                           int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Extremum golden_section_max(const std::function<double(double)>& f, double a, double b,
                            double x_tol, int max_iter) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

double log_add_exp(double a, double b) noexcept {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a == kInf || b == kInf) return kInf;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line needs at least two matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  }
  return fit;
}

double ceil_significant(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  const double mag = std::floor(std::log10(std::abs(x)));
  const double scale = std::pow(10.0, static_cast<double>(digits - 1) - mag);
  const double up = std::ceil(x * scale) / scale;
  return up >= x ? up : std::nextafter(x, kInf);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("INEQFORGE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> GridSpec::points() const {
  return log ? logspace(from, to, steps) : linspace(from, to, steps);
}

std::string GridSpec::to_string() const {
  std::ostringstream os;
  os << format_g17(from) << ':' << format_g17(to) << ':' << steps << (log ? ":log" : "");
  return os.str();
}

GridSpec parse_grid_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) {
    fail(ErrorCode::parse_error, "grid spec must be from:to:steps[:log], got '" + text + "'");
  }
  GridSpec spec;
  try {
    spec.from = std::stod(parts[0]);
    spec.to = std::stod(parts[1]);
    const long steps = std::stol(parts[2]);
    if (steps < 1) fail(ErrorCode::parse_error, "grid steps must be >= 1");
    spec.steps = static_cast<std::size_t>(steps);
  } catch (const std::logic_error&) {
    fail(ErrorCode::parse_error, "malformed grid spec '" + text + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] != "log" && parts[3] != "lin") {
      fail(ErrorCode::parse_error, "grid spacing must be 'log' or 'lin'");
    }
    spec.log = parts[3] == "log";
  }
  if (spec.log && (spec.from <= 0 || spec.to <= 0)) {
    fail(ErrorCode::parse_error, "log grid endpoints must be positive");
  }
  return spec;
}

std::string format_g17(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace ineqforge
