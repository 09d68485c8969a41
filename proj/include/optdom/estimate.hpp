#pragma once

#include <cmath>
#include <optional>
#include <string>

namespace optdom {

/// Method tags carried by NormEstimate.
namespace method {
inline constexpr const char* exact_sign_enumeration = "exact-sign-enumeration";
inline constexpr const char* subset_sup_sandwich = "subset-sup-sandwich";
inline constexpr const char* local_search = "local-search";
inline constexpr const char* truncation = "truncation";
inline constexpr const char* closed_form = "closed-form";
}  // namespace method

/// A computed norm with a certified bracket lower <= true value <= upper.
/// `value` is present only when the bracket is closed.
struct NormEstimate {
  std::optional<double> value;
  double lower = 0.0;
  double upper = 0.0;
  std::string method;
  std::string certificate;

  bool exact() const { return value.has_value(); }
  bool bounded_above() const { return std::isfinite(upper); }

  static NormEstimate exact_value(double v, std::string method, std::string certificate) {
    return {v, v, v, std::move(method), std::move(certificate)};
  }
  static NormEstimate bracket(double lo, double hi, std::string method, std::string certificate) {
    NormEstimate e{std::nullopt, lo, hi, std::move(method), std::move(certificate)};
    if (lo == hi) e.value = lo;
    return e;
  }

  /// Applies a nondecreasing map to every number in the estimate.
  template <class F>
  NormEstimate mapped(F&& f) const {
    NormEstimate r = *this;
    if (r.value) r.value = f(*r.value);
    r.lower = f(lower);
    r.upper = std::isinf(upper) ? upper : f(upper);
    return r;
  }
};

}  // namespace optdom
