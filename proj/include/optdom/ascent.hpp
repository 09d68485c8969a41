#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optdom/numeric.hpp"
#include "optdom/parallel.hpp"

namespace optdom {

struct AscentOptions {
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 10000;
  double tolerance = 1e-10;
};

struct AscentResult {
  double value = -kInf;
  std::vector<double> x;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t start = 0;  // index of the winning start
};

/// Objective on the nonnegative orthant, homogeneous of degree 0 and
/// returning -inf at x = 0.
using RatioFn = std::function<double(const std::vector<double>&)>;
/// Gradient of the objective at x, or nullopt where unavailable.
using RatioGrad = std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

namespace detail {

inline void normalize_max(std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, v);
  if (m > 0.0)
    for (double& v : x) v /= m;
}

/// Multiplicative gradient steps in log coordinates,
/// log x_k += eta * x_k * dR/dx_k / R. Coordinates stay positive.
inline void log_gradient_ascent(std::vector<double>& x, double& value, const RatioFn& f, const RatioGrad& grad,
                                const AscentOptions& opt, AscentResult& stats) {
  double eta = 0.5;
  std::vector<double> trial(x.size());
  for (std::size_t it = 0; it < opt.max_iterations && eta > 1e-14; ++it) {
    ++stats.iterations;
    const auto g = grad(x);
    if (!g || !(value > 0.0)) return;
    double gmax = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) gmax = std::max(gmax, std::abs(x[k] * (*g)[k] / value));
    if (!(gmax > 0.0) || !std::isfinite(gmax)) return;
    for (;;) {
      for (std::size_t k = 0; k < x.size(); ++k)
        trial[k] = x[k] * std::exp(std::clamp(eta * x[k] * (*g)[k] / value, -30.0, 30.0));
      normalize_max(trial);
      const double v = f(trial);
      ++stats.evaluations;
      if (v > value) {
        const double gain = (v - value) / value;
        x = trial;
        value = v;
        eta *= 2.0;
        if (gain < opt.tolerance) return;
        break;
      }
      eta *= 0.5;
      if (eta <= 1e-14) return;
    }
  }
}

/// One-dimensional search of t -> f(x with x_k = t) over [0, hi]: a
/// quadratic-spaced scan followed by golden-section refinement.
inline bool coordinate_step(std::vector<double>& x, double& value, std::size_t k, const RatioFn& f,
                            AscentResult& stats) {
  const double hi = 4.0;
  constexpr int kScan = 16;
  const double keep = x[k];
  auto at = [&](double t) {
    x[k] = t;
    ++stats.evaluations;
    return f(x);
  };
  double best_t = keep, best_v = value;
  int best_m = -1;
  for (int m = 0; m <= kScan; ++m) {
    const double t = hi * (static_cast<double>(m) / kScan) * (static_cast<double>(m) / kScan);
    const double v = at(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
      best_m = m;
    }
  }
  double lo_t, hi_t;
  if (best_m >= 0) {
    auto node = [&](int m) { return hi * (static_cast<double>(m) / kScan) * (static_cast<double>(m) / kScan); };
    lo_t = node(std::max(0, best_m - 1));
    hi_t = node(std::min(kScan, best_m + 1));
  } else {
    lo_t = std::max(0.0, keep * 0.5);
    hi_t = std::min(hi, keep * 1.5 + 1e-12);
  }
  const double phi = 0.6180339887498949;
  double a = lo_t, b = hi_t;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = at(c), fd = at(d);
  for (int it = 0; it < 60 && b - a > 1e-15 * (1.0 + b); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = at(d);
    }
  }
  if (fc > best_v) {
    best_v = fc;
    best_t = c;
  }
  if (fd > best_v) {
    best_v = fd;
    best_t = d;
  }
  x[k] = best_t;
  const bool improved = best_v > value;
  value = best_v;
  return improved;
}

inline void coordinate_ascent(std::vector<double>& x, double& value, const RatioFn& f, const AscentOptions& opt,
                              AscentResult& stats) {
  const std::size_t sweeps = std::max<std::size_t>(1, std::min<std::size_t>(200, opt.max_iterations));
  for (std::size_t s = 0; s < sweeps; ++s) {
    ++stats.iterations;
    const double before = value;
    for (std::size_t k = 0; k < x.size(); ++k) coordinate_step(x, value, k, f, stats);
    normalize_max(x);
    value = f(x);
    ++stats.evaluations;
    if (!(value > before * (1.0 + opt.tolerance))) return;
  }
}

}  // namespace detail

/// Maximises a degree-0 homogeneous ratio over nonzero x >= 0 in R^n.
///
/// Every start in `starts` and `opt.restarts` seeded random starts is run
/// through multiplicative log-gradient ascent (when `grad` is given) and then
/// coordinate line searches, which can also move coordinates to zero. The
/// reported value is always an evaluated feasible point. Ties go to the
/// lowest start index, so the result does not depend on scheduling.
inline AscentResult maximize_ratio(std::size_t n, const RatioFn& f, const RatioGrad& grad,
                                   std::vector<std::vector<double>> starts, const AscentOptions& opt,
                                   std::string_view task = "ascent") {
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    Rng rng(opt.seed, task, r);
    std::vector<double> x(n);
    for (double& v : x) {
      const double u = rng.uniform();
      v = u * u * u + 1e-3;
    }
    starts.push_back(std::move(x));
  }
  std::vector<AscentResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    AscentResult& res = results[s];
    res.start = s;
    std::vector<double> x = starts[s];
    detail::normalize_max(x);
    double value = f(x);
    ++res.evaluations;
    if (!std::isfinite(value)) value = -kInf;
    if (grad) detail::log_gradient_ascent(x, value, f, grad, opt, res);
    detail::coordinate_ascent(x, value, f, opt, res);
    res.value = value;
    res.x = std::move(x);
  });
  AscentResult best;
  std::size_t iterations = 0, evaluations = 0;
  for (const AscentResult& r : results) {
    iterations += r.iterations;
    evaluations += r.evaluations;
    if (r.value > best.value) best = r;
  }
  best.iterations = iterations;
  best.evaluations = evaluations;
  return best;
}

}  // namespace optdom
