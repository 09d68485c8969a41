#pragma once

// Brute-force reference computations, independent of the solvers they
// check: sum norms are searched on explicit grids, L1(m) norms go through
// random dual vectors or matrix application, subset sups through integrate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/matop.hpp"
#include "optdom/numeric.hpp"
#include "optdom/seqspace.hpp"
#include "optdom/vmeasure.hpp"

namespace optdom::oracle {

/// Relative slack of young_check.
inline constexpr double kYoungSlack = 1e-12;

/// Young's inequality a^r b^r <= (r/s) a^s + (r/t) b^t, 1/r = 1/s + 1/t.
/// Returns rhs - lhs, scaled by max(rhs, tiny).
inline double young_gap(double a, double b, double s, double t) {
  const double r = 1.0 / (1.0 / s + 1.0 / t);
  const double lhs = std::pow(a, r) * std::pow(b, r);
  const double rhs = (r / s) * std::pow(a, s) + (r / t) * std::pow(b, t);
  return (rhs - lhs) / std::max(rhs, 1e-300);
}

inline bool young_check(double a, double b, double s, double t) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(s > 0.0) || !(t > 0.0))
    throw InvalidArgument("young_check needs a, b >= 0 and s, t > 0");
  return young_gap(a, b, s, t) >= -kYoungSlack;
}

namespace detail {

/// Largest possible increase of ||u|| when u (with ||u|| <= bound) is moved
/// by a vector of norm at most d.
inline double perturbation(const SpaceSpec& s, double bound, double d) {
  const double k = quasinorm_constant(s);
  if (k == 1.0) return d;
  if (s.is_lq_family()) {
    const double q = s.q();
    return std::pow(std::pow(bound, q) + std::pow(d, q), 1.0 / q) - bound;
  }
  return (k - 1.0) * bound + k * d;
}

template <class Visit>
void for_each_grid_point(std::size_t dims, std::size_t steps, Visit&& visit) {
  std::vector<std::size_t> idx(dims, 0);
  for (;;) {
    visit(idx);
    std::size_t k = 0;
    while (k < dims && ++idx[k] > steps) idx[k++] = 0;
    if (k == dims) return;
  }
}

}  // namespace detail

/// Minimum over the aligned grid u_i in {0, |f_i|/g, ..., |f_i|} of
/// ||u sign f||_X + ||(|f| - u) sign f||_Y.
inline double sum_norm_bruteforce(const SpaceSpec& x, const SpaceSpec& y, const FiniteVector& f,
                                  std::size_t grid_steps = 64) {
  if (f.size() > 4) throw InvalidArgument("sum_norm_bruteforce supports at most 4 nonzero entries");
  if (grid_steps == 0) throw InvalidArgument("grid_steps must be positive");
  if (f.empty()) return 0.0;
  const auto es = f.entries();
  std::vector<double> a(f.max_index(), 0.0), b(f.max_index(), 0.0);
  double best = kInf;
  detail::for_each_grid_point(es.size(), grid_steps, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t k = 0; k < es.size(); ++k) {
      const double frac = static_cast<double>(idx[k]) / static_cast<double>(grid_steps);
      const double u = idx[k] == grid_steps ? es[k].value : es[k].value * frac;
      a[es[k].index - 1] = u;
      b[es[k].index - 1] = idx[k] == grid_steps ? 0.0 : es[k].value - u;
    }
    best = std::min(best, norm_dense(x, a) + norm_dense(y, b));
  });
  return best;
}

/// How far sum_norm_bruteforce can sit above the true infimum.
inline double grid_modulus(const SpaceSpec& x, const SpaceSpec& y, const FiniteVector& f,
                           std::size_t grid_steps = 64) {
  const double nx = norm(x, f), ny = norm(y, f);
  const double h = 0.5 / static_cast<double>(grid_steps);
  return detail::perturbation(x, nx, nx * h) + detail::perturbation(y, ny, ny * h);
}

/// max over sampled y in the unit ball of E' of sum_j |f_j| |<C_j, y>|.
/// Includes the norming functionals of every atom and of sum |f_j| C_j.
inline double l1m_norm_dual_sample(const AtomicVectorMeasure& m, const FiniteVector& f, std::size_t samples,
                                   std::uint64_t seed) {
  const SpaceSpec& e = m.codomain();
  if (e.kind() != SpaceKind::lq || e.q() < 1.0)
    throw UnsupportedDual("dual sampling needs an unweighted Lq codomain with q >= 1");
  if (f.empty()) return 0.0;
  const double q = e.q();
  const double qd = conjugate_exponent(q);
  Index rows = 0;
  for (const Entry& x : f.entries()) rows = std::max(rows, m.atom(x.index).max_index());
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  for (const Entry& x : f.entries()) {
    atoms.push_back(m.atom(x.index).dense(rows));
    weights.push_back(std::abs(x.value));
  }
  auto dual_norm = [&](const std::vector<double>& y) {
    return norm_dense(SpaceSpec::lq(qd), y);
  };
  auto score = [&](std::vector<double> y) {
    const double n = dual_norm(y);
    if (!(n > 0.0)) return 0.0;
    CompensatedSum s;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      CompensatedSum dot;
      for (Index i = 0; i < rows; ++i) dot += atoms[k][i] * y[i];
      s += weights[k] * std::abs(dot.value());
    }
    return s.value() / n;
  };
  auto norming = [&](const std::vector<double>& c) {
    std::vector<double> y(rows, 0.0);
    if (std::isinf(q)) {
      std::size_t arg = 0;
      for (std::size_t i = 0; i < rows; ++i)
        if (std::abs(c[i]) > std::abs(c[arg])) arg = i;
      y[arg] = c[arg] < 0.0 ? -1.0 : 1.0;
      return y;
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (c[i] == 0.0) continue;
      y[i] = (c[i] < 0.0 ? -1.0 : 1.0) * (q == 1.0 ? 1.0 : std::pow(std::abs(c[i]), q - 1.0));
    }
    return y;
  };
  double best = 0.0;
  std::vector<double> total(rows, 0.0);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    best = std::max(best, score(norming(atoms[k])));
    for (Index i = 0; i < rows; ++i) total[i] += weights[k] * atoms[k][i];
  }
  best = std::max(best, score(norming(total)));
  best = std::max(best, score(std::vector<double>(rows, 1.0)));
  Rng rng(seed, "dual-sample");
  std::vector<double> y(rows);
  for (std::size_t s = 0; s < samples; ++s) {
    const double sparsity = rng.uniform();
    for (double& v : y) {
      v = rng.uniform(-1.0, 1.0);
      if (rng.uniform() < sparsity * 0.5) v = 0.0;
    }
    // q = 1: sign vectors, the extreme points of the l-infinity ball.
    if (q == 1.0)
      for (double& v : y) v = v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0);
    best = std::max(best, score(y));
  }
  return best;
}

/// Exact sup over all subsets A of supp f of ||integrate(m, f, A)||_E.
inline double exhaustive_subset_sup(const AtomicVectorMeasure& m, const FiniteVector& f) {
  if (f.size() > 20) throw InvalidArgument("exhaustive_subset_sup supports at most 20 nonzero entries");
  const IndexSet supp = f.support();
  double best = 0.0;
  const std::uint64_t total = std::uint64_t{1} << supp.size();
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    IndexSet a;
    for (std::size_t k = 0; k < supp.size(); ++k)
      if ((mask >> k) & 1u) a.push_back(supp[k]);
    best = std::max(best, norm(m.codomain(), integrate(m, f, a)));
  }
  return best;
}

/// max over sampled pairs of ||f + g|| / (||f|| + ||g||).
inline double quasinorm_axiom_scan(const SpaceSpec& space, std::size_t samples, std::uint64_t seed) {
  auto ratio = [&](const FiniteVector& f, const FiniteVector& g) {
    const double d = norm(space, f) + norm(space, g);
    return d > 0.0 ? norm(space, f + g) / d : 0.0;
  };
  double best = ratio(FiniteVector::unit(1), FiniteVector::unit(2));
  Rng rng(seed, "quasinorm-scan");
  for (std::size_t s = 0; s < samples; ++s) {
    const Index len = 1 + rng.below(6);
    std::vector<Entry> a, b;
    for (Index i = 1; i <= len; ++i) {
      const int mode = static_cast<int>(rng.below(3));  // 0: f only, 1: g only, 2: both
      const double u = rng.uniform(-2.0, 2.0), v = rng.uniform(-2.0, 2.0);
      if (mode != 1) a.push_back({i, u});
      if (mode != 0) b.push_back({i, rng.coin() ? v : u});
    }
    best = std::max(best, ratio(FiniteVector::from_entries(std::move(a)), FiniteVector::from_entries(std::move(b))));
  }
  return best;
}

namespace detail {

/// Visits every x = k/steps with nonnegative integers k summing to steps.
template <class Visit>
void for_each_simplex_point(std::size_t n, std::size_t steps, Visit&& visit) {
  std::vector<double> x(n, 0.0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t left) {
    if (k + 1 == n) {
      x[k] = static_cast<double>(left) / static_cast<double>(steps);
      visit(x);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      x[k] = static_cast<double>(c) / static_cast<double>(steps);
      rec(k + 1, left - c);
    }
  };
  rec(0, steps);
}

inline FiniteVector from_weights(const std::vector<double>& x) {
  return FiniteVector::from_dense(std::span<const double>(x));
}

inline void require_small(std::size_t n) {
  if (n == 0 || n > 4) throw InvalidArgument("simplex-grid oracles support 1 <= n <= 4");
}

/// max over all sign patterns of ||M (eps x)||_E, through apply.
inline double l1m_by_apply(const MatrixOperator& m, const SpaceSpec& e, const std::vector<double>& x, Index n_E) {
  double best = 0.0;
  const std::size_t n = x.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> y(x);
    for (std::size_t k = 0; k < n; ++k)
      if ((mask >> k) & 1u) y[k] = -y[k];
    best = std::max(best, norm(e, apply(m, from_weights(y), n_E)));
  }
  return best;
}

}  // namespace detail

/// Grid search of ||M x||_E / ||x||_domain over the simplex, step 1/steps.
inline double grid_best_constant(const MatrixOperator& m, const SpaceSpec& e, const SpaceSpec& domain, Index n,
                                 Index n_E, std::size_t steps = 64) {
  detail::require_small(n);
  double best = 0.0;
  detail::for_each_simplex_point(n, steps, [&](const std::vector<double>& x) {
    const FiniteVector f = detail::from_weights(x);
    if (f.empty()) return;
    best = std::max(best, norm(e, apply(m, f, n_E)) / norm(domain, f));
  });
  return best;
}

/// Grid search of the r-power domination ratio with exhaustive subset sups.
inline double grid_power_domination(const MatrixOperator& m, const SpaceSpec& e, double r, Index n, Index n_E,
                                    std::size_t steps = 64) {
  detail::require_small(n);
  double best = 0.0;
  detail::for_each_simplex_point(n, steps, [&](const std::vector<double>& x) {
    std::vector<double> xr(n);
    for (std::size_t k = 0; k < n; ++k) xr[k] = x[k] > 0.0 ? std::pow(x[k], r) : 0.0;
    const double num = std::pow(norm(e, apply(m, detail::from_weights(xr), n_E)), 1.0 / r);
    double den = 0.0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<double> y(n, 0.0);
      for (std::size_t k = 0; k < n; ++k)
        if ((mask >> k) & 1u) y[k] = x[k];
      den = std::max(den, norm(e, apply(m, detail::from_weights(y), n_E)));
    }
    if (den > 0.0) best = std::max(best, num / den);
  });
  return best;
}

/// Grid search of ||x||_{L^r(m)} / ||x||_{L1(m)} with norms by sign
/// enumeration through apply.
inline double grid_embedding(const MatrixOperator& m, const SpaceSpec& e, double r, Index n, Index n_E,
                             std::size_t steps = 64) {
  detail::require_small(n);
  double best = 0.0;
  detail::for_each_simplex_point(n, steps, [&](const std::vector<double>& x) {
    std::vector<double> xr(n);
    for (std::size_t k = 0; k < n; ++k) xr[k] = x[k] > 0.0 ? std::pow(x[k], r) : 0.0;
    const double den = detail::l1m_by_apply(m, e, x, n_E);
    if (den > 0.0) best = std::max(best, std::pow(detail::l1m_by_apply(m, e, xr, n_E), 1.0 / r) / den);
  });
  return best;
}

}  // namespace optdom::oracle
