#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "optdom/error.hpp"

namespace optdom {

enum class Verdict { bounded_evidence, unbounded_evidence, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded_evidence: return "bounded-evidence";
    case Verdict::unbounded_evidence: return "unbounded-evidence";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Slope thresholds of the growth-fit rule.
inline constexpr double kBoundedSlope = 0.05;
inline constexpr double kUnboundedSlope = 0.2;

/// Least-squares fit of log(value) against log(n).
struct GrowthFit {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
  Verdict verdict = Verdict::inconclusive;
};

/// Points with n <= 0 or value <= 0 carry no information and are skipped.
/// Fewer than two usable points (or a single distinct n) is inconclusive.
inline GrowthFit fit_growth(std::span<const double> ns, std::span<const double> values) {
  if (ns.size() != values.size()) throw InvalidArgument("fit_growth: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] > 0.0 && values[k] > 0.0 && std::isfinite(values[k])) {
      xs.push_back(std::log(ns[k]));
      ys.push_back(std::log(values[k]));
    }
  }
  GrowthFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) return fit;
  fit.exponent = sxy / sxx;
  if (fit.exponent < kBoundedSlope)
    fit.verdict = Verdict::bounded_evidence;
  else if (fit.exponent > kUnboundedSlope)
    fit.verdict = Verdict::unbounded_evidence;
  return fit;
}

/// {n/8, n/4, n/2, n}, dropping entries below 1 and duplicates.
inline std::vector<std::size_t> doubling_window(std::size_t n) {
  std::vector<std::size_t> w;
  for (std::size_t d : {8u, 4u, 2u, 1u}) {
    const std::size_t m = n / d;
    if (m >= 1 && (w.empty() || w.back() != m)) w.push_back(m);
  }
  return w;
}

/// Fit of a series s_1..s_n (s[k] at n = k + 1) over the doubling window.
inline GrowthFit fit_series_window(std::span<const double> series) {
  std::vector<double> ns, vs;
  for (std::size_t m : doubling_window(series.size())) {
    ns.push_back(static_cast<double>(m));
    vs.push_back(series[m - 1]);
  }
  return fit_growth(ns, vs);
}

}  // namespace optdom
