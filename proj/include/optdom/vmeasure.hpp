#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/estimate.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/matop.hpp"
#include "optdom/numeric.hpp"
#include "optdom/parallel.hpp"
#include "optdom/seqspace.hpp"

namespace optdom {

/// Hard cap on the exact sign-enumeration branch.
inline constexpr std::size_t kMaxEnumeration = 24;
/// Entries smaller than this in magnitude are rejected by the L1(m) norms.
inline constexpr double kTinyEntry = 1e-300;

struct MeasureOptions {
  std::size_t n_enum = 20;
  std::uint64_t seed = 0;
  std::size_t restarts = 32;
  /// Add the declared column tail (rows beyond the truncation) to upper brackets.
  bool use_tail = true;
};

/// The measure A -> M chi_A on finite subsets of N, with atoms m({j}) = C_j
/// retained on the first n_E codomain coordinates.
class AtomicVectorMeasure {
 public:
  AtomicVectorMeasure(MatrixOperator source, SpaceSpec codomain, Index n_E)
      : source_(std::move(source)), codomain_(std::move(codomain)), n_E_(n_E),
        cache_(std::make_shared<Cache>()) {
    if (n_E_ == 0) throw InvalidArgument("codomain truncation must be positive");
  }

  const MatrixOperator& source() const { return source_; }
  const SpaceSpec& codomain() const { return codomain_; }
  Index truncation() const { return n_E_; }

  /// C_j on the first n_E rows. A vanishing atom is a contract violation.
  const FiniteVector& atom(Index j) const {
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->atoms.find(j); it != cache_->atoms.end()) return it->second;
    }
    FiniteVector c = nonzero_column(source_, j, n_E_);
    std::lock_guard lock(cache_->mutex);
    return cache_->atoms.emplace(j, std::move(c)).first->second;
  }

  /// m(A) = sum of the atoms over A.
  FiniteVector measure(const IndexSet& set) const {
    std::vector<CompensatedSum> acc(n_E_);
    for (Index j : set)
      for (const Entry& e : atom(j).entries()) acc[e.index - 1] += e.value;
    std::vector<double> out(n_E_);
    for (Index i = 0; i < n_E_; ++i) out[i] = acc[i].value();
    return FiniteVector::from_dense(out);
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::unordered_map<Index, FiniteVector> atoms;
  };
  MatrixOperator source_;
  SpaceSpec codomain_;
  Index n_E_;
  std::shared_ptr<Cache> cache_;
};

/// Integral of f over A: sum over j in A of f_j C_j, accumulated column by
/// column (an independent path from apply, which works row by row).
inline FiniteVector integrate(const AtomicVectorMeasure& m, const FiniteVector& f, const IndexSet& set) {
  std::vector<CompensatedSum> acc(m.truncation());
  Index rows = 0;
  for (const Entry& e : f.entries()) {
    if (!std::binary_search(set.begin(), set.end(), e.index)) continue;
    for (const Entry& c : m.atom(e.index).entries()) {
      acc[c.index - 1] += e.value * c.value;
      rows = std::max(rows, c.index);
    }
  }
  std::vector<double> out(rows);
  for (Index i = 0; i < rows; ++i) out[i] = acc[i].value();
  return FiniteVector::from_dense(out);
}

inline FiniteVector integrate(const AtomicVectorMeasure& m, const FiniteVector& f) {
  return integrate(m, f, f.support());
}

namespace detail {

/// Dense working copy of the scaled atoms |f_j| C_j, j in supp f, cut to
/// the rows where some atom is nonzero.
struct AtomBlock {
  std::size_t rows = 0;
  std::vector<std::vector<double>> cols;  // cols[k][i]
  std::vector<double> weights;            // f_j (signed)
  double triangle = 0.0;                  // sum |f_j| ||C_j||
  double mass = 0.0;                      // sum |f_j|

  AtomBlock(const AtomicVectorMeasure& m, const FiniteVector& f) {
    for (const Entry& e : f.entries())
      if (std::abs(e.value) < kTinyEntry)
        throw InvalidArgument("entry at index " + std::to_string(e.index) + " has magnitude below 1e-300");
    for (const Entry& e : f.entries()) rows = std::max(rows, m.atom(e.index).max_index());
    CompensatedSum tri, ms;
    for (const Entry& e : f.entries()) {
      const FiniteVector& c = m.atom(e.index);
      std::vector<double> col(rows, 0.0);
      const double a = std::abs(e.value);
      for (const Entry& x : c.entries()) col[x.index - 1] = a * x.value;
      cols.push_back(std::move(col));
      weights.push_back(e.value);
      tri += a * norm(m.codomain(), c);
      ms += a;
    }
    triangle = tri.value();
    mass = ms.value();
  }

  std::size_t size() const { return cols.size(); }

  /// sum_k sign_k * cols[k], bit k of `pattern` set meaning sign -1.
  std::vector<double> combine(std::uint64_t pattern) const {
    std::vector<double> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      CompensatedSum s;
      for (std::size_t k = 0; k < cols.size(); ++k) s += ((pattern >> k) & 1u) ? -cols[k][i] : cols[k][i];
      y[i] = s.value();
    }
    return y;
  }

  /// sum over k in subset of f_k C_k (signed weights, unscaled by sign).
  std::vector<double> subset_sum(const std::vector<char>& in) const {
    std::vector<double> y(rows, 0.0);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (!in[k]) continue;
      const double s = weights[k] < 0.0 ? -1.0 : 1.0;
      for (std::size_t i = 0; i < rows; ++i) y[i] += s * cols[k][i];
    }
    return y;
  }
};

struct PatternBest {
  double value = -1.0;
  std::uint64_t pattern = 0;
};

/// Exhaustive max over sign patterns with the first sign fixed to +.
/// Patterns are visited in Gray-code order inside fixed-size chunks; each
/// chunk starts from an exact recomputation so results do not depend on the
/// number of threads.
inline PatternBest enumerate_patterns(const AtomBlock& b, const SpaceSpec& e) {
  const std::size_t s = b.size();
  if (s == 0) return {0.0, 0};
  const std::uint64_t total = std::uint64_t{1} << (s - 1);
  constexpr std::uint64_t kChunk = std::uint64_t{1} << 14;
  constexpr std::uint64_t kRefresh = 1024;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<PatternBest> best(chunks);
  auto gray = [](std::uint64_t k) { return k ^ (k >> 1); };
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk, end = std::min(total, begin + kChunk);
    PatternBest local;
    std::vector<double> y;
    for (std::uint64_t k = begin; k < end; ++k) {
      const std::uint64_t g = gray(k) << 1;  // bit 0 (first atom) stays +
      if (k == begin || (k - begin) % kRefresh == 0) {
        y = b.combine(g);
      } else {
        const std::uint64_t flipped = g ^ (gray(k - 1) << 1);
        const std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(flipped));
        const double sign = ((g >> bit) & 1u) ? -2.0 : 2.0;
        const std::vector<double>& col = b.cols[bit];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += sign * col[i];
      }
      const double v = norm_dense(e, y);
      if (v > local.value) local = {v, g};
    }
    best[c] = local;
  });
  PatternBest r;
  for (const PatternBest& p : best)
    if (p.value > r.value) r = p;
  r.value = norm_dense(e, b.combine(r.pattern));
  return r;
}

/// Best sign pattern found by single-bit-flip hill climbing from seeded
/// random starts (plus the all-plus start).
inline PatternBest local_search_patterns(const AtomBlock& b, const SpaceSpec& e, std::size_t restarts,
                                         std::uint64_t seed) {
  const std::size_t s = b.size();
  std::vector<PatternBest> results(restarts + 1);
  parallel_for(restarts + 1, [&](std::size_t r) {
    Rng rng(seed, "l1m-local-search", r);
    std::vector<char> neg(s, 0);
    if (r > 0)
      for (std::size_t k = 1; k < s; ++k) neg[k] = rng.coin();
    std::vector<double> y(b.rows, 0.0);
    for (std::size_t k = 0; k < s; ++k)
      for (std::size_t i = 0; i < b.rows; ++i) y[i] += neg[k] ? -b.cols[k][i] : b.cols[k][i];
    double cur = norm_dense(e, y);
    std::vector<double> trial(b.rows);
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t k = 0; k < s; ++k) {
        const double sign = neg[k] ? 2.0 : -2.0;
        for (std::size_t i = 0; i < b.rows; ++i) trial[i] = y[i] + sign * b.cols[k][i];
        const double v = norm_dense(e, trial);
        if (v > cur * (1.0 + 1e-14)) {
          cur = v;
          y.swap(trial);
          neg[k] = !neg[k];
          improved = true;
        }
      }
    }
    std::uint64_t code = 0;  // low 64 atoms only; informational
    for (std::size_t k = 0; k < std::min<std::size_t>(s, 64); ++k)
      if (neg[k]) code |= std::uint64_t{1} << k;
    results[r] = {cur, code};
  });
  PatternBest best;
  for (const PatternBest& p : results)
    if (p.value > best.value) best = p;
  return best;
}

/// Greedy exploration of sup over subsets A of ||sum_{j in A} f_j C_j||:
/// growth from the empty set and pruning from the full set.
inline double greedy_subset_sup(const AtomBlock& b, const SpaceSpec& e) {
  const std::size_t s = b.size();
  double best = 0.0;
  for (int mode = 0; mode < 2; ++mode) {
    std::vector<char> in(s, mode == 1);
    double cur = norm_dense(e, b.subset_sum(in));
    for (bool improved = true; improved;) {
      improved = false;
      std::size_t arg = s;
      double arg_v = cur;
      for (std::size_t k = 0; k < s; ++k) {
        in[k] = !in[k];
        const double v = norm_dense(e, b.subset_sum(in));
        in[k] = !in[k];
        if (v > arg_v * (1.0 + 1e-14)) {
          arg_v = v;
          arg = k;
        }
      }
      if (arg < s) {
        in[arg] = !in[arg];
        cur = arg_v;
        improved = true;
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

inline bool all_nonnegative(const AtomBlock& b) {
  for (const auto& c : b.cols)
    for (double v : c)
      if (v < 0.0) return false;
  return true;
}

/// Upper bound on the full-length norm given the truncated value `head`:
/// rows beyond the truncation are dominated by (sum |f_j|) times the
/// declared column tail.
inline std::optional<double> tail_upper(const AtomicVectorMeasure& m, const AtomBlock& b, double head) {
  const DecayModel& model = m.source().column_tail();
  if (!model.declared()) return std::nullopt;
  const SpaceSpec& e = m.codomain();
  const auto t = norm_with_tail(e, FiniteVector{}, model, m.truncation(), b.mass);
  if (!t) return std::nullopt;
  const auto closed = closed_form_power(e);
  if (!closed && e.kind() != SpaceKind::lq) return head + *t;
  const double q = closed ? closed->q() : e.q();
  if (std::isinf(q)) return std::max(head, *t);
  const double big = std::max(head, *t);
  if (big == 0.0) return 0.0;
  return big * std::pow(std::pow(head / big, q) + std::pow(*t / big, q), 1.0 / q);
}

}  // namespace detail

/// Norm of f in L1(m): sup over the dual unit ball of sum_j |f_j| |<C_j, x*>|,
/// computed as the max over sign patterns of ||sum_j e_j |f_j| C_j||_E.
inline NormEstimate l1m_norm(const AtomicVectorMeasure& m, const FiniteVector& f, const MeasureOptions& opt = {}) {
  const SpaceSpec& e = m.codomain();
  if (quasinorm_constant(e) != 1.0)
    throw InvalidSpace("L1(m) norms need a normed codomain; " + e.describe() + " is only quasi-normed");
  if (opt.n_enum > kMaxEnumeration)
    throw InvalidArgument("n_enum must not exceed " + std::to_string(kMaxEnumeration));
  if (f.empty()) return NormEstimate::exact_value(0.0, method::exact_sign_enumeration, "zero function");
  const detail::AtomBlock b(m, f);
  const std::string trunc = "codomain truncated to " + std::to_string(m.truncation()) + " rows";

  auto finish = [&](double lower, double upper, const char* how, std::string cert) {
    bool extents_closed = true;
    for (const Entry& x : f.entries()) {
      const auto ext = m.source().column_extent(x.index);
      extents_closed = extents_closed && ext && *ext <= m.truncation();
    }
    if (extents_closed) {
      cert += "; atoms fully inside the truncation";
    } else if (opt.use_tail) {
      if (auto t = detail::tail_upper(m, b, upper)) {
        upper = *t;
        cert += "; " + trunc + ", declared column tail added to the upper bound";
      } else {
        cert += "; " + trunc + ", no tail bound available";
      }
    } else {
      cert += "; " + trunc;
    }
    return NormEstimate::bracket(lower, upper, how, std::move(cert));
  };

  if (m.source().nonnegative() || detail::all_nonnegative(b)) {
    const double v = norm_dense(e, b.combine(0));
    return finish(v, v, method::exact_sign_enumeration,
                  "nonnegative atoms: the all-plus sign pattern is optimal by lattice monotonicity");
  }
  if (b.size() <= opt.n_enum) {
    const detail::PatternBest best = detail::enumerate_patterns(b, e);
    std::ostringstream cert;
    cert << "max over all 2^" << (b.size() - 1) << " sign patterns";
    return finish(best.value, best.value, method::exact_sign_enumeration, cert.str());
  }
  const double subset = detail::greedy_subset_sup(b, e);
  const detail::PatternBest ls = detail::local_search_patterns(b, e, opt.restarts, opt.seed);
  const double lower = std::max(subset, ls.value);
  const double upper = std::max(lower, b.triangle);
  std::ostringstream cert;
  cert.precision(17);
  cert << "lower = max(greedy subset sup " << subset << ", best of " << opt.restarts
       << " bit-flip restarts " << ls.value << "); upper = sum |f_j| ||C_j|| (triangle inequality)";
  const bool sandwich = upper <= 2.0 * subset;
  if (sandwich) cert << "; bracket lies within the factor-2 subset sandwich";
  return finish(lower, upper, sandwich ? method::subset_sup_sandwich : method::local_search, cert.str());
}

/// ||f||_{L^p(m)} = || |f|^p ||_{L1(m)}^(1/p).
inline NormEstimate lpm_norm(const AtomicVectorMeasure& m, const FiniteVector& f, double p,
                             const MeasureOptions& opt = {}) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("L^p(m) exponent must lie in (0, inf)");
  if (p == 1.0) return l1m_norm(m, f, opt);
  const NormEstimate base = l1m_norm(m, f.pow_abs(p), opt);
  NormEstimate r = base.mapped([p](double v) { return std::pow(v, 1.0 / p); });
  r.certificate = "p-th root of the L1(m) norm of |f|^p: " + base.certificate;
  return r;
}

struct OptimalDomainNorms {
  NormEstimate l1;
  NormEstimate l_inv_p;
  NormEstimate intersection;
};

/// Norms of f in L1(m), L^(1/p)(m) and their intersection.
inline OptimalDomainNorms optimal_domain_norms(const AtomicVectorMeasure& m, const FiniteVector& f, double p,
                                               const MeasureOptions& opt = {}) {
  if (!(p > 1.0)) throw InvalidArgument("optimal domain norms need p > 1");
  OptimalDomainNorms r;
  r.l1 = l1m_norm(m, f, opt);
  r.l_inv_p = lpm_norm(m, f, 1.0 / p, opt);
  r.intersection = NormEstimate::bracket(std::max(r.l1.lower, r.l_inv_p.lower),
                                         std::max(r.l1.upper, r.l_inv_p.upper),
                                         r.l1.method == r.l_inv_p.method ? r.l1.method : method::local_search,
                                         "max of the L1(m) and L^(1/p)(m) brackets");
  return r;
}

/// ||m||(A) = ||chi_A||_{L1(m)}.
inline NormEstimate semivariation(const AtomicVectorMeasure& m, const IndexSet& set, const MeasureOptions& opt = {}) {
  return l1m_norm(m, FiniteVector::indicator(set), opt);
}

}  // namespace optdom
