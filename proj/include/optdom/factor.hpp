#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optdom/ascent.hpp"
#include "optdom/error.hpp"
#include "optdom/estimate.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/growth.hpp"
#include "optdom/matop.hpp"
#include "optdom/numeric.hpp"
#include "optdom/seqspace.hpp"
#include "optdom/vmeasure.hpp"

namespace optdom {

/// Outcome of a sufficient-condition series test.
enum class SeriesVerdict { converges, diverges, inconclusive };

inline std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::converges: return "converges";
    case SeriesVerdict::diverges: return "diverges";
    case SeriesVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// A lower bound for a supremum, attained at `maximizer`.
struct ConstantEstimate {
  double value = 0.0;
  std::vector<double> maximizer;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::string method;
  std::string note;
};

struct FactorOptions {
  AscentOptions ascent;
  std::size_t n_enum = 20;
  bool use_tail = true;
};

namespace detail {

/// First n columns as a dense rows x n block, rows cut to the last row any
/// column reaches within n_E.
struct ColumnBlock {
  std::size_t rows = 0;
  std::size_t n = 0;
  std::vector<std::vector<double>> cols;
  bool image_truncated = false;

  ColumnBlock(const MatrixOperator& m, Index n_cols, Index n_E) : n(n_cols) {
    std::vector<FiniteVector> cs;
    for (Index j = 1; j <= n_cols; ++j) {
      cs.push_back(nonzero_column(m, j, n_E));
      rows = std::max(rows, cs.back().max_index());
      const auto ext = m.column_extent(j);
      image_truncated = image_truncated || !ext || *ext > n_E;
    }
    for (const FiniteVector& c : cs) cols.push_back(c.dense(rows));
  }

  std::vector<double> times(const std::vector<double>& x) const {
    std::vector<double> y(rows, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] == 0.0) continue;
      for (std::size_t i = 0; i < rows; ++i) y[i] += x[j] * cols[j][i];
    }
    return y;
  }

  /// Transpose times a dense row vector g.
  std::vector<double> transpose_times(const std::vector<double>& g) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += cols[j][i] * g[i];
      out[j] = s;
    }
    return out;
  }
};

inline std::vector<std::vector<double>> standard_starts(std::size_t n, const std::vector<double>* warm) {
  std::vector<std::vector<double>> s;
  if (warm && !warm->empty()) {
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < std::min(n, warm->size()); ++k) w[k] = (*warm)[k];
    s.push_back(std::move(w));
  }
  s.emplace_back(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    s.push_back(std::move(e));
  }
  return s;
}

inline bool nonzero(const std::vector<double>& x) {
  return std::any_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
}

/// True when every e_j has norm 1 in the space (built from unweighted Lq).
inline bool unit_vectors_normalized(const SpaceSpec& s) {
  switch (s.kind()) {
    case SpaceKind::lq: return true;
    case SpaceKind::weighted_lq: return false;
    case SpaceKind::power: return unit_vectors_normalized(s.base());
    case SpaceKind::sum:
    case SpaceKind::intersection: return unit_vectors_normalized(s.left()) && unit_vectors_normalized(s.right());
  }
  return false;
}

}  // namespace detail

/// Lower bound for sup { ||M x||_E : x >= 0 on [1, n], ||x||_domain = 1 },
/// with columns probed on n_E rows. `warm` (a previous maximizer, padded
/// with zeros) keeps the estimate nondecreasing along a schedule.
inline ConstantEstimate best_constant(const MatrixOperator& m, const SpaceSpec& e, const SpaceSpec& domain, Index n,
                                      Index n_E, const FactorOptions& opt = {},
                                      const std::vector<double>* warm = nullptr) {
  if (n == 0) throw InvalidArgument("best_constant needs n >= 1");
  const detail::ColumnBlock block(m, n, n_E);
  auto ratio = [&](const std::vector<double>& x) {
    if (!detail::nonzero(x)) return -kInf;
    return norm_dense(e, block.times(x)) / norm_dense(domain, x);
  };
  RatioGrad grad = [&](const std::vector<double>& x) -> std::optional<std::vector<double>> {
    const std::vector<double> y = block.times(x);
    const auto ge = norm_gradient(e, y);
    const auto gd = norm_gradient(domain, x);
    if (!ge || !gd) return std::nullopt;
    const double ny = norm_dense(e, y), nx = norm_dense(domain, x);
    if (!(nx > 0.0)) return std::nullopt;
    std::vector<double> g = block.transpose_times(*ge);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = g[k] / nx - ny * (*gd)[k] / (nx * nx);
    return g;
  };
  const AscentResult r = maximize_ratio(n, ratio, grad, detail::standard_starts(n, warm), opt.ascent,
                                        "best-constant");
  ConstantEstimate c{r.value, r.x, r.iterations, r.evaluations, "multiplicative log-gradient ascent with coordinate search", ""};
  const double nx = norm_dense(domain, c.maximizer);
  for (double& v : c.maximizer) v /= nx;
  if (block.image_truncated)
    c.note = "image measured on the first " + std::to_string(n_E) + " codomain rows only";
  return c;
}

struct ConditionIResult {
  double p = 0.0;
  double exponent = 0.0;               // p'
  std::vector<double> partial_lower;   // sum_{j<=k} lower(||C_j||)^p'
  std::vector<double> partial_upper;   // same with upper brackets (may be inf)
  std::optional<double> tail_bound;    // declared bound on sum_{j>n} ||C_j||^p'
  bool certified = false;
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  GrowthFit fit;
  std::string note;

  /// Bound on (sum_j ||C_j||^p')^(1/p') when certified.
  std::optional<double> hoelder_constant() const {
    if (!certified || partial_upper.empty()) return std::nullopt;
    return std::pow(partial_upper.back() + *tail_bound, 1.0 / exponent);
  }
};

/// Partial sums of ||C_j||_E^p' for j <= n, with the declared column-norm
/// tail when available.
inline ConditionIResult condition_I(const MatrixOperator& m, const SpaceSpec& e, double p, Index n, Index n_E,
                                    bool use_tail = true) {
  if (!(p > 1.0)) throw InvalidArgument("condition I needs p > 1");
  ConditionIResult r;
  r.p = p;
  r.exponent = conjugate_exponent(p);
  if (n == 0) {
    r.note = "empty series";
    return r;
  }
  std::vector<NormEstimate> cols(n);
  parallel_for(n, [&](std::size_t k) {
    nonzero_column(m, k + 1, n_E);
    cols[k] = column_norm(m, k + 1, e, n_E, use_tail);
  });
  CompensatedSum lo, hi;
  bool finite = true;
  for (const NormEstimate& c : cols) {
    lo += std::pow(c.lower, r.exponent);
    finite = finite && std::isfinite(c.upper);
    if (finite) hi += std::pow(c.upper, r.exponent);
    r.partial_lower.push_back(lo.value());
    r.partial_upper.push_back(finite ? hi.value() : kInf);
  }
  const MatrixTraits& t = m.traits();
  if (use_tail && t.column_norm_tail.declared() && (!t.column_norm_tail_lq_only || detail::unit_vectors_normalized(e))) {
    const double tail = t.column_norm_tail.tail_power_sum(n, r.exponent);
    if (std::isfinite(tail)) r.tail_bound = tail;
  }
  r.certified = r.tail_bound && std::isfinite(r.partial_upper.back());
  r.fit = fit_series_window(r.partial_lower);
  std::ostringstream note;
  note.precision(12);
  if (r.certified) {
    r.verdict = SeriesVerdict::converges;
    note << "certified sufficient condition met: sum ||C_j||^p' <= " << r.partial_upper.back() + *r.tail_bound
         << " with the declared column-norm tail";
  } else {
    if (r.fit.verdict == Verdict::bounded_evidence) r.verdict = SeriesVerdict::converges;
    if (r.fit.verdict == Verdict::unbounded_evidence) r.verdict = SeriesVerdict::diverges;
    note << "finite-truncation evidence from partial sums over the doubling window";
  }
  if (r.verdict != SeriesVerdict::converges)
    note << "; this condition is sufficient only, so its failure does not rule out boundedness";
  r.note = note.str();
  return r;
}

struct ConstantPoint {
  Index n = 0;
  ConstantEstimate estimate;
};

struct FactorabilityReport {
  double p = 0.0;
  std::vector<Index> schedule;
  std::vector<ConstantPoint> constants;
  GrowthFit fit;
  bool monotone = true;
  ConditionIResult condition_I;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

/// C_p(n) = best_constant with domain Lq(p) along the schedule, condition I
/// over `series_terms` columns (default: the last schedule point), and the
/// combined verdict.
inline FactorabilityReport factorability_verdict(const MatrixOperator& m, const SpaceSpec& e, double p,
                                                 const std::vector<Index>& schedule, Index n_E,
                                                 const FactorOptions& opt = {}, Index series_terms = 0) {
  if (!(p > 1.0)) throw InvalidArgument("factorability needs p > 1");
  if (schedule.empty()) throw InvalidArgument("schedule must not be empty");
  for (std::size_t k = 0; k < schedule.size(); ++k)
    if (schedule[k] == 0 || (k > 0 && schedule[k] <= schedule[k - 1]))
      throw InvalidArgument("schedule must be strictly increasing positive integers");
  FactorabilityReport r;
  r.p = p;
  r.schedule = schedule;
  const SpaceSpec domain = SpaceSpec::lq(p);
  std::vector<double> ns, vs;
  const std::vector<double>* warm = nullptr;
  for (Index n : schedule) {
    r.constants.push_back({n, best_constant(m, e, domain, n, n_E, opt, warm)});
    warm = &r.constants.back().estimate.maximizer;
    ns.push_back(static_cast<double>(n));
    vs.push_back(r.constants.back().estimate.value);
  }
  for (std::size_t k = 1; k < vs.size(); ++k)
    if (vs[k] < vs[k - 1] * (1.0 - 1e-9)) r.monotone = false;
  r.fit = fit_growth(ns, vs);
  r.condition_I = condition_I(m, e, p, series_terms == 0 ? schedule.back() : series_terms, n_E, opt.use_tail);
  if (r.condition_I.verdict == SeriesVerdict::converges) {
    r.verdict = Verdict::bounded_evidence;
    r.note = r.condition_I.certified ? "certified sufficient condition met (column-norm series)"
                                     : "finite-truncation evidence: column-norm series appears to converge";
  } else {
    r.verdict = r.fit.verdict;
    r.note = "finite-truncation evidence from the growth of C_p(n)";
  }
  if (!r.monotone) r.note += "; WARNING: C_p(n) decreased along the schedule (optimizer failure)";
  return r;
}

struct RowsConditionResult {
  double q = 0.0;
  std::vector<double> row_norms;     // ||F_i||_1, i <= n
  std::vector<double> partial_sums;  // sum_{i<=k} ||F_i||_1^q
  std::size_t truncated_rows = 0;    // rows summed only up to the column truncation
  GrowthFit fit;
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  std::string note;
};

/// Row criterion for nonnegative matrices into Lq(q): partial sums of
/// ||F_i||_1^q. Rows without a declared extent are summed over n_cols columns.
inline RowsConditionResult rows_condition(const MatrixOperator& m, double q, Index n, Index n_cols) {
  if (!m.nonnegative())
    throw PreconditionError("the row criterion requires a matrix declared nonnegative; " + m.name() + " is not");
  if (!(q >= 1.0) || std::isinf(q)) throw InvalidArgument("the row criterion needs a finite q >= 1");
  RowsConditionResult r;
  r.q = q;
  r.row_norms.resize(n);
  std::vector<char> cut(n, 0);
  parallel_for(n, [&](std::size_t k) {
    const Index i = k + 1;
    const auto ext = m.row_extent(i);
    cut[k] = !ext || *ext > n_cols;
    const FiniteVector f = row(m, i, ext ? std::min(*ext, n_cols) : n_cols);
    CompensatedSum s;
    for (const Entry& e : f.entries()) s += std::abs(e.value);
    r.row_norms[k] = s.value();
  });
  CompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    acc += std::pow(r.row_norms[k], q);
    r.partial_sums.push_back(acc.value());
    r.truncated_rows += cut[k];
  }
  std::ostringstream note;
  if (n == 0) {
    note << "empty series";
  } else {
    r.fit = fit_series_window(r.partial_sums);
    if (r.fit.verdict == Verdict::bounded_evidence) r.verdict = SeriesVerdict::converges;
    if (r.fit.verdict == Verdict::unbounded_evidence) r.verdict = SeriesVerdict::diverges;
    note << "finite-truncation evidence from partial sums over the doubling window";
    if (r.verdict == SeriesVerdict::converges)
      note << "; r-power domination (r = 1/p) certified by sufficient condition, via Hoelder's inequality "
              "applied twice, provided the series converges";
    else
      note << "; this condition is sufficient only";
  }
  if (r.truncated_rows > 0)
    note << "; " << r.truncated_rows << " row(s) summed only over the first " << n_cols << " columns";
  r.note = note.str();
  return r;
}

namespace detail {

/// sup over subsets N of [1, n] of ||sum_{j in N} x_j C_j||_E.
inline double subset_sup(const ColumnBlock& b, const SpaceSpec& e, const std::vector<double>& x, bool nonnegative,
                         std::size_t n_enum) {
  const std::size_t n = b.n;
  if (nonnegative) return norm_dense(e, b.times(x));
  if (n <= n_enum) {
    double best = 0.0;
    std::vector<double> y(b.rows);
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t prev = 0;
    std::fill(y.begin(), y.end(), 0.0);
    for (std::uint64_t k = 1; k < total; ++k) {
      const std::uint64_t g = k ^ (k >> 1);
      const std::uint64_t flip = g ^ prev;
      const std::size_t j = static_cast<std::size_t>(__builtin_ctzll(flip));
      const double s = (g & flip) ? x[j] : -x[j];
      for (std::size_t i = 0; i < b.rows; ++i) y[i] += s * b.cols[j][i];
      prev = g;
      if (k % 1024 == 0) {
        std::vector<double> z(b.rows, 0.0);
        for (std::size_t jj = 0; jj < n; ++jj)
          if ((g >> jj) & 1u)
            for (std::size_t i = 0; i < b.rows; ++i) z[i] += x[jj] * b.cols[jj][i];
        y.swap(z);
      }
      best = std::max(best, norm_dense(e, y));
    }
    return best;
  }
  std::vector<double> in(n, 0.0);
  double cur = 0.0;
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t j = 0; j < n; ++j) {
      in[j] = in[j] > 0.0 ? 0.0 : x[j];
      const double v = norm_dense(e, b.times(in));
      if (v > cur) {
        cur = v;
        improved = true;
      } else {
        in[j] = in[j] > 0.0 ? 0.0 : x[j];
      }
    }
  }
  return cur;
}

}  // namespace detail

/// Lower bound for D_r(n) = sup over nonzero x >= 0 on [1, n] of
/// ||sum x_j^r C_j||^(1/r) / sup_{N} ||sum_{j in N} x_j C_j||.
inline ConstantEstimate power_domination_constant(const MatrixOperator& m, const SpaceSpec& e, double r, Index n,
                                                  Index n_E, const FactorOptions& opt = {}) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("domination exponent r must lie in (0, inf)");
  if (n == 0) throw InvalidArgument("power_domination_constant needs n >= 1");
  const detail::ColumnBlock block(m, n, n_E);
  const bool nonneg = m.nonnegative();
  auto ratio = [&](const std::vector<double>& x) {
    if (!detail::nonzero(x)) return -kInf;
    std::vector<double> xr(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) xr[k] = x[k] > 0.0 ? std::pow(x[k], r) : 0.0;
    const double num = std::pow(norm_dense(e, block.times(xr)), 1.0 / r);
    const double den = detail::subset_sup(block, e, x, nonneg, opt.n_enum);
    return num / den;
  };
  const AscentResult a = maximize_ratio(n, ratio, nullptr, detail::standard_starts(n, nullptr), opt.ascent,
                                        "power-domination");
  ConstantEstimate c{a.value, a.x, a.iterations, a.evaluations, "coordinate search over the nonnegative orthant", ""};
  std::string note;
  if (nonneg)
    note = "denominator is the full-set norm (declared nonnegative matrix)";
  else if (n <= opt.n_enum)
    note = "denominator by exhaustive subset enumeration";
  else
    note = "denominator by greedy subset search; the ratio may overestimate";
  if (r > 1.0) note += "; r > 1 is unusual here";
  c.note = note;
  return c;
}

/// Lower bound for B_r(n) = sup over nonzero x >= 0 on [1, n] of
/// ||x||_{L^r(m)} / ||x||_{L1(m)}, with exact norms (n <= n_enum).
inline ConstantEstimate embedding_constant(const MatrixOperator& m, const SpaceSpec& e, double r, Index n, Index n_E,
                                           const FactorOptions& opt = {}) {
  if (n > opt.n_enum) throw InvalidArgument("embedding constant needs n <= n_enum for exact norms");
  const AtomicVectorMeasure mu(m, e, n_E);
  MeasureOptions mo;
  mo.n_enum = opt.n_enum;
  mo.seed = opt.ascent.seed;
  mo.use_tail = false;
  auto ratio = [&](const std::vector<double>& x) {
    if (!detail::nonzero(x)) return -kInf;
    std::vector<Entry> es;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k] > 1e-90) es.push_back({k + 1, x[k]});
    if (es.empty()) return -kInf;
    const FiniteVector f = FiniteVector::from_entries(std::move(es));
    return lpm_norm(mu, f, r, mo).lower / l1m_norm(mu, f, mo).lower;
  };
  const AscentResult a = maximize_ratio(n, ratio, nullptr, detail::standard_starts(n, nullptr), opt.ascent,
                                        "embedding-ratio");
  return {a.value, a.x, a.iterations, a.evaluations, "coordinate search with exact L1(m) norms", ""};
}

struct DominationCheck {
  double r = 0.0;
  ConstantEstimate D;
  ConstantEstimate B;
  bool first_half_ok = false;   // D <= 2 B
  bool second_half_ok = false;  // B <= 2^(1/r) D
};

inline constexpr double kDominationTolerance = 1e-6;

/// Finite-scale consequences of "L1(m) is contained in L^r(m) iff r-power
/// domination": D <= 2B and B <= 2^(1/r) D.
inline DominationCheck domination_embedding_check(const MatrixOperator& m, const SpaceSpec& e, double r, Index n,
                                                  Index n_E, const FactorOptions& opt = {}) {
  DominationCheck c;
  c.r = r;
  c.D = power_domination_constant(m, e, r, n, n_E, opt);
  c.B = embedding_constant(m, e, r, n, n_E, opt);
  c.first_half_ok = c.D.value <= 2.0 * c.B.value + kDominationTolerance;
  c.second_half_ok = c.B.value <= std::pow(2.0, 1.0 / r) * c.D.value + kDominationTolerance;
  return c;
}

/// integrate(m, f) against apply(M, f, n_E), coordinatewise.
inline bool extension_consistency(const MatrixOperator& m, const SpaceSpec& e, const FiniteVector& f, Index n_E,
                                  double tol = 1e-12) {
  const AtomicVectorMeasure mu(m, e, n_E);
  const FiniteVector a = integrate(mu, f);
  const FiniteVector b = apply(m, f, n_E);
  double scale = 1.0;
  for (const Entry& x : a.entries()) scale = std::max(scale, std::abs(x.value));
  for (const Entry& x : b.entries()) scale = std::max(scale, std::abs(x.value));
  const Index rows = std::max(a.max_index(), b.max_index());
  for (Index i = 1; i <= rows; ++i)
    if (std::abs(a[i] - b[i]) > tol * scale) return false;
  return true;
}

}  // namespace optdom
