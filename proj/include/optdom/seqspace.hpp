#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/numeric.hpp"
#include "optdom/space.hpp"

namespace optdom {

/// A norm evaluation with its certified bracket. lower == upper == value for
/// the closed-form branches; Sum branches carry the solver's bracket.
struct NormValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Result of splitting f = first + second for a Sum space.
struct SumDecomposition {
  FiniteVector first;   // measured in the left space
  FiniteVector second;  // measured in the right space
  double value = 0.0;   // ||first||_X + ||second||_Y
  double lower = 0.0;   // certified lower bound on the infimum
  double upper = 0.0;
  bool convex = true;   // both factors are norms
  std::size_t evaluations = 0;
};

/// Relative tolerance of the sum-norm solver.
inline constexpr double kSumTolerance = 1e-8;

NormValue evaluate(const SpaceSpec& space, const FiniteVector& f);
SumDecomposition sum_norm_decomposition(const SpaceSpec& space, const FiniteVector& f);

inline double norm(const SpaceSpec& space, const FiniteVector& f) { return evaluate(space, f).value; }

namespace detail {

struct NoWeight {
  double operator()(Index) const { return 1.0; }
};

struct SpaceWeight {
  const Weights* w;
  double operator()(Index i) const { return (*w)(i); }
};

/// (sum_i w_i |v_i|^q)^(1/q), or max_i w_i |v_i| for q = inf, over the pairs
/// produced by for_each. Terms are rescaled by their maximum so that the
/// result is finite whenever it is representable.
template <class ForEach, class WeightFn>
double lq_norm_impl(ForEach&& for_each, double q, WeightFn weight) {
  const bool infinite = std::isinf(q);
  constexpr bool unweighted = std::is_same_v<WeightFn, NoWeight>;
  auto term = [&](Index i, double v) {
    const double a = std::abs(v);
    if constexpr (unweighted) return a;
    return infinite ? weight(i) * a : std::pow(weight(i), 1.0 / q) * a;
  };
  double peak = 0.0;
  Index arg = 0;
  for_each([&](Index i, double v) {
    if (v == 0.0) return;
    const double t = term(i, v);
    if (!std::isfinite(t)) throw RangeError("norm term overflows", i);
    if (t > peak) {
      peak = t;
      arg = i;
    }
  });
  if (peak == 0.0 || infinite) return peak;
  CompensatedSum s;
  if (q == 1.0) {
    for_each([&](Index i, double v) {
      if (v != 0.0) s.add(term(i, v));
    });
    const double r = s.value();
    if (!std::isfinite(r)) throw RangeError("norm overflows", arg);
    return r;
  }
  for_each([&](Index i, double v) {
    if (v != 0.0) s.add(std::pow(term(i, v) / peak, q));
  });
  const double r = peak * std::pow(s.value(), 1.0 / q);
  if (!std::isfinite(r)) throw RangeError("norm overflows", arg);
  return r;
}

inline auto entries_of(const FiniteVector& f) {
  return [&f](auto&& fn) {
    for (const Entry& e : f.entries()) fn(e.index, e.value);
  };
}

inline auto dense_of(std::span<const double> y) {
  return [y](auto&& fn) {
    for (std::size_t k = 0; k < y.size(); ++k) fn(static_cast<Index>(k + 1), y[k]);
  };
}

template <class ForEach>
double lq_family_norm(const SpaceSpec& s, ForEach&& fe) {
  if (s.kind() == SpaceKind::lq) return lq_norm_impl(fe, s.q(), NoWeight{});
  return lq_norm_impl(fe, s.q(), SpaceWeight{&s.weights()});
}

/// Power(Lq(q), p) is Lq(q p); likewise for weighted bases with finite q.
inline std::optional<SpaceSpec> closed_form_power(const SpaceSpec& s) {
  if (s.kind() != SpaceKind::power) return std::nullopt;
  const SpaceSpec b = s.base();
  if (b.kind() == SpaceKind::lq) return SpaceSpec::lq(b.q() * s.p());
  if (b.kind() == SpaceKind::weighted_lq && !std::isinf(b.q()))
    return SpaceSpec::weighted_lq(b.q() * s.p(), b.weights());
  return std::nullopt;
}

}  // namespace detail

/// Norm of a dense vector y (y[k] sits at index k + 1).
inline double norm_dense(const SpaceSpec& space, std::span<const double> y) {
  if (space.is_lq_family()) return detail::lq_family_norm(space, detail::dense_of(y));
  if (auto closed = detail::closed_form_power(space))
    return detail::lq_family_norm(*closed, detail::dense_of(y));
  return norm(space, FiniteVector::from_dense(y));
}

/// Triangle constant K (upper bound) of the quasi-norm.
inline double quasinorm_constant(const SpaceSpec& space) {
  switch (space.kind()) {
    case SpaceKind::lq:
    case SpaceKind::weighted_lq:
      return space.q() >= 1.0 ? 1.0 : std::pow(2.0, 1.0 / space.q() - 1.0);
    case SpaceKind::power: {
      const double k = quasinorm_constant(space.base());
      const double p = space.p();
      if (p >= 1.0) return std::pow(k, 1.0 / p);
      return std::pow(k, 1.0 / p) * std::pow(2.0, 1.0 / p - 1.0);
    }
    case SpaceKind::sum:
    case SpaceKind::intersection:
      return std::max(quasinorm_constant(space.left()), quasinorm_constant(space.right()));
  }
  return 1.0;
}

inline bool has_koethe_dual(const SpaceSpec& space) {
  return space.is_lq_family() && space.q() >= 1.0;
}

/// Norm of f in the Köthe dual of `space` (Lq or weighted Lq, q >= 1).
inline double koethe_dual_norm(const SpaceSpec& space, const FiniteVector& f) {
  if (!has_koethe_dual(space))
    throw UnsupportedDual("no closed-form Köthe dual for " + space.describe());
  const double q = space.q();
  const double qd = conjugate_exponent(q);
  if (space.kind() == SpaceKind::lq) return detail::lq_norm_impl(detail::entries_of(f), qd, detail::NoWeight{});
  const Weights& w = space.weights();
  if (q == 1.0)
    return detail::lq_norm_impl(detail::entries_of(f), kInf, [&w](Index i) { return 1.0 / w(i); });
  if (std::isinf(q))
    return detail::lq_norm_impl(detail::entries_of(f), 1.0, [&w](Index i) { return 1.0 / w(i); });
  return detail::lq_norm_impl(detail::entries_of(f), qd,
                              [&w, q, qd](Index i) { return std::pow(w(i), -qd / q); });
}

/// Gradient of y -> ||y|| at a dense point, where the norm is differentiable
/// in closed form. Sum spaces return nullopt.
inline std::optional<std::vector<double>> norm_gradient(const SpaceSpec& space, std::span<const double> y) {
  std::vector<double> g(y.size(), 0.0);
  if (auto closed = detail::closed_form_power(space)) return norm_gradient(*closed, y);
  switch (space.kind()) {
    case SpaceKind::lq:
    case SpaceKind::weighted_lq: {
      const bool weighted = space.kind() == SpaceKind::weighted_lq;
      auto w = [&](std::size_t k) { return weighted ? space.weights()(k + 1) : 1.0; };
      const double q = space.q();
      if (std::isinf(q)) {
        double best = 0.0;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < y.size(); ++k) {
          const double t = w(k) * std::abs(y[k]);
          if (t > best) {
            best = t;
            arg = k;
          }
        }
        if (best > 0.0) g[arg] = w(arg) * (y[arg] > 0.0 ? 1.0 : -1.0);
        return g;
      }
      const double n = norm_dense(space, y);
      if (n == 0.0) return g;
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (y[k] == 0.0) continue;
        const double s = y[k] > 0.0 ? 1.0 : -1.0;
        g[k] = w(k) * s * std::pow(std::abs(y[k]) / n, q - 1.0);
      }
      return g;
    }
    case SpaceKind::power: {
      const double p = space.p();
      std::vector<double> z(y.size());
      for (std::size_t k = 0; k < y.size(); ++k) z[k] = std::pow(std::abs(y[k]), p);
      auto gb = norm_gradient(space.base(), z);
      if (!gb) return std::nullopt;
      const double b = norm_dense(space.base(), z);
      if (b == 0.0) return g;
      const double outer = std::pow(b, 1.0 / p - 1.0);
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (y[k] == 0.0) continue;
        const double s = y[k] > 0.0 ? 1.0 : -1.0;
        g[k] = outer * (*gb)[k] * std::pow(std::abs(y[k]), p - 1.0) * s;
      }
      return g;
    }
    case SpaceKind::intersection: {
      const SpaceSpec l = space.left(), r = space.right();
      return norm_dense(l, y) >= norm_dense(r, y) ? norm_gradient(l, y) : norm_gradient(r, y);
    }
    case SpaceKind::sum:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Given f = g1 + g2, the aligned pair (h1, h2): h1 = sign(f) min(|f|, |g1|),
/// h2 = f - h1. Lattice monotonicity gives ||h1|| <= ||g1||, ||h2|| <= ||g2||.
inline std::pair<FiniteVector, FiniteVector> aligned_projection(const FiniteVector& f,
                                                                const FiniteVector& first_part) {
  std::vector<Entry> h1;
  for (const Entry& e : f.entries()) {
    const double m = std::min(std::abs(e.value), std::abs(first_part[e.index]));
    if (m != 0.0) h1.push_back({e.index, e.value > 0.0 ? m : -m});
  }
  FiniteVector first = FiniteVector::from_entries(std::move(h1));
  return {first, f - first};
}

namespace detail {

/// Minimises ||u||_X + ||a - u||_Y over the box 0 <= u <= a, where a = |f|
/// restricted to its support.
class SumSolver {
 public:
  SumSolver(SpaceSpec x, SpaceSpec y, const FiniteVector& f)
      : x_(std::move(x)), y_(std::move(y)), f_(f) {
    for (const Entry& e : f.entries()) {
      idx_.push_back(e.index);
      a_.push_back(std::abs(e.value));
    }
    convex_ = quasinorm_constant(x_) == 1.0 && quasinorm_constant(y_) == 1.0;
  }

  SumDecomposition solve() {
    SumDecomposition out;
    out.convex = convex_;
    if (a_.empty()) return out;
    std::vector<double> u = convex_ ? solve_convex() : solve_nonconvex();
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = snap(u[k], a_[k]);
    const double value = cost(u);
    std::vector<Entry> first, second;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double fk = f_[idx_[k]];
      const double part = fk > 0.0 ? u[k] : -u[k];
      first.push_back({idx_[k], part});
      second.push_back({idx_[k], fk - part});
    }
    out.first = FiniteVector::from_entries(std::move(first));
    out.second = FiniteVector::from_entries(std::move(second));
    out.value = value;
    out.upper = value;
    out.lower = std::min(lower_bound(u), value);
    out.evaluations = evals_;
    return out;
  }

 private:
  FiniteVector build(const std::vector<double>& m) const {
    std::vector<Entry> es;
    es.reserve(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) es.push_back({idx_[k], m[k]});
    return FiniteVector::from_entries(std::move(es));
  }

  std::vector<double> complement(const std::vector<double>& u) const {
    std::vector<double> r(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) r[k] = std::max(0.0, a_[k] - u[k]);
    return r;
  }

  double cost(const std::vector<double>& u) {
    ++evals_;
    return evaluate(x_, build(u)).value + evaluate(y_, build(complement(u))).value;
  }

  /// Rounds u onto the grid of multiples of ulp(a), so a - u and
  /// u + (a - u) are exact.
  static double snap(double u, double a) {
    int e = 0;
    std::frexp(a, &e);
    const double quantum = std::ldexp(1.0, e - 53);
    const double r = std::round(u / quantum) * quantum;
    return std::clamp(r, 0.0, a);
  }

  /// Moves u along d to the best point found on the feasible segment.
  double line_search(std::vector<double>& u, const std::vector<double>& d, double current, bool scan) {
    double tmin = -kInf, tmax = kInf;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (d[k] == 0.0) continue;
      double t0 = (0.0 - u[k]) / d[k], t1 = (a_[k] - u[k]) / d[k];
      if (t0 > t1) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
    }
    if (!(tmax > tmin) || !std::isfinite(tmin) || !std::isfinite(tmax)) return current;
    std::vector<double> trial(u.size());
    auto at = [&](double t) {
      for (std::size_t k = 0; k < u.size(); ++k) trial[k] = std::clamp(u[k] + t * d[k], 0.0, a_[k]);
      return cost(trial);
    };
    double best_t = 0.0, best = current;
    auto consider = [&](double t, double v) {
      if (v < best) {
        best = v;
        best_t = t;
      }
    };
    double lo = tmin, hi = tmax;
    consider(tmin, at(tmin));
    consider(tmax, at(tmax));
    if (scan) {
      constexpr int kScan = 16;
      const double h = (tmax - tmin) / kScan;
      int arg = -1;
      double arg_v = kInf;
      for (int s = 0; s <= kScan; ++s) {
        const double t = tmin + s * h;
        const double v = at(t);
        consider(t, v);
        if (v < arg_v) {
          arg_v = v;
          arg = s;
        }
      }
      lo = tmin + std::max(0, arg - 1) * h;
      hi = tmin + std::min(kScan, arg + 1) * h;
    }
    constexpr double kInvPhi = 0.6180339887498949;
    const double width = tmax - tmin;
    double c = hi - kInvPhi * (hi - lo), dd = lo + kInvPhi * (hi - lo);
    double fc = at(c), fd = at(dd);
    consider(c, fc);
    consider(dd, fd);
    for (int it = 0; it < 80 && (hi - lo) > 1e-11 * width; ++it) {
      if (fc <= fd) {
        hi = dd;
        dd = c;
        fd = fc;
        c = hi - kInvPhi * (hi - lo);
        fc = at(c);
        consider(c, fc);
      } else {
        lo = c;
        c = dd;
        fc = fd;
        dd = lo + kInvPhi * (hi - lo);
        fd = at(dd);
        consider(dd, fd);
      }
    }
    if (best < current) {
      for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::clamp(u[k] + best_t * d[k], 0.0, a_[k]);
      return cost(u);
    }
    return current;
  }

  double coordinate_sweep(std::vector<double>& u, double current, bool scan) {
    std::vector<double> d(u.size(), 0.0);
    for (std::size_t k = 0; k < u.size(); ++k) {
      d[k] = 1.0;
      current = line_search(u, d, current, scan);
      d[k] = 0.0;
    }
    return current;
  }

  std::vector<std::vector<double>> pattern_directions(const std::vector<double>& u, std::uint64_t round) const {
    const std::size_t n = u.size();
    std::vector<std::vector<double>> dirs;
    auto pair_dirs = [&](std::size_t i, std::size_t j) {
      std::vector<double> d(n, 0.0);
      d[i] = a_[i];
      d[j] = -a_[j];
      dirs.push_back(d);
      d[j] = a_[j];
      dirs.push_back(d);
    };
    Rng rng(0x5eedULL, "sum-directions", round);
    if (n <= 24) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pair_dirs(i, j);
    } else {
      for (int s = 0; s < 96; ++s) {
        const std::size_t i = rng.below(n), j = rng.below(n);
        if (i != j) pair_dirs(i, j);
      }
    }
    dirs.push_back(u);
    dirs.push_back(complement(u));
    for (int s = 0; s < 8; ++s) {
      std::vector<double> d(n);
      for (std::size_t k = 0; k < n; ++k) d[k] = a_[k] * rng.uniform(-1.0, 1.0);
      dirs.push_back(std::move(d));
    }
    return dirs;
  }

  double pattern_search(std::vector<double>& u, double current, bool scan, std::uint64_t round) {
    for (const auto& d : pattern_directions(u, round)) current = line_search(u, d, current, scan);
    return current;
  }

  std::vector<std::vector<double>> deterministic_starts() const {
    const std::size_t n = a_.size();
    std::vector<std::vector<double>> starts;
    starts.emplace_back(n, 0.0);
    starts.push_back(a_);
    std::vector<double> half(n), vertex(n);
    for (std::size_t k = 0; k < n; ++k) {
      half[k] = a_[k] / 2.0;
      const double ex = evaluate(x_, FiniteVector::unit(idx_[k])).value;
      const double ey = evaluate(y_, FiniteVector::unit(idx_[k])).value;
      vertex[k] = ex <= ey ? a_[k] : 0.0;
    }
    starts.push_back(std::move(half));
    starts.push_back(std::move(vertex));
    return starts;
  }

  std::vector<double> solve_convex() {
    auto starts = deterministic_starts();
    std::vector<double> u;
    double current = kInf;
    for (auto& s : starts) {
      const double v = cost(s);
      if (v < current) {
        current = v;
        u = s;
      }
    }
    for (std::uint64_t outer = 0; outer < 500; ++outer) {
      const double before = current;
      current = coordinate_sweep(u, current, false);
      if (before - current > kSumTolerance * 1e-4 * std::max(current, 1e-300)) continue;
      const double prior = current;
      current = pattern_search(u, current, false, outer);
      if (!(prior - current > 1e-14 * std::max(current, 1e-300))) break;
    }
    return u;
  }

  double local_descent(std::vector<double>& u, double current) {
    for (int sweep = 0; sweep < 200; ++sweep) {
      const double before = current;
      current = coordinate_sweep(u, current, true);
      if (!(before - current > 1e-12 * std::max(current, 1e-300))) break;
    }
    return current;
  }

  std::vector<double> solve_nonconvex() {
    constexpr std::size_t kStarts = 32;
    auto starts = deterministic_starts();
    for (std::size_t s = starts.size(); s < kStarts; ++s) {
      Rng rng(0x5eedULL, "sum-start", s);
      std::vector<double> u(a_.size());
      for (std::size_t k = 0; k < a_.size(); ++k) u[k] = a_[k] * rng.uniform();
      starts.push_back(std::move(u));
    }
    std::vector<double> best_u;
    double best = kInf;
    for (auto& s : starts) {
      const double v = local_descent(s, cost(s));
      if (v < best) {
        best = v;
        best_u = s;
      }
    }
    // Refinement grid: per-coordinate scan at step a_k / 64, then descent.
    for (std::uint64_t round = 0; round < 50; ++round) {
      const double before = best;
      std::vector<double> trial = best_u;
      for (std::size_t k = 0; k < a_.size(); ++k) {
        double arg = trial[k];
        for (int s = 0; s <= 64; ++s) {
          trial[k] = a_[k] * s / 64.0;
          const double v = cost(trial);
          if (v < best) {
            best = v;
            arg = trial[k];
          }
        }
        trial[k] = arg;
      }
      best_u = trial;
      best = local_descent(best_u, cost(best_u));
      best = pattern_search(best_u, best, true, round);
      if (!(before - best > 1e-12 * std::max(best, 1e-300))) break;
    }
    return best_u;
  }

  /// max over coordinates of a_k min(||e_k||_X, ||e_k||_Y), and, when both
  /// Köthe duals are explicit, <a, y> / max(||y||_X', ||y||_Y') over a few
  /// candidate dual vectors y >= 0.
  double lower_bound(const std::vector<double>& u) {
    double lb = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const FiniteVector e = FiniteVector::unit(idx_[k]);
      lb = std::max(lb, a_[k] * std::min(evaluate(x_, e).lower, evaluate(y_, e).lower));
    }
    if (!has_koethe_dual(x_) || !has_koethe_dual(y_)) return lb;
    const auto gx = norming(x_, u);
    const auto gy = norming(y_, complement(u));
    std::vector<std::vector<double>> cands;
    cands.push_back(std::vector<double>(a_.size(), 1.0));
    cands.push_back(a_);
    for (int s = 0; s <= 10; ++s) {
      const double t = s / 10.0;
      std::vector<double> c(a_.size());
      for (std::size_t k = 0; k < a_.size(); ++k) c[k] = t * gx[k] + (1.0 - t) * gy[k];
      cands.push_back(std::move(c));
    }
    for (const auto& c : cands) {
      const FiniteVector yv = build(c);
      if (yv.empty()) continue;
      const double denom = std::max(koethe_dual_norm(x_, yv), koethe_dual_norm(y_, yv));
      if (!(denom > 0.0) || !std::isfinite(denom)) continue;
      CompensatedSum pair;
      for (std::size_t k = 0; k < a_.size(); ++k) pair.add(a_[k] * c[k]);
      lb = std::max(lb, pair.value() / denom);
    }
    return lb;
  }

  /// Unit-dual-norm vector norming m in an Lq-family space (support of f).
  std::vector<double> norming(const SpaceSpec& s, const std::vector<double>& m) const {
    std::vector<double> g(m.size(), 0.0);
    const bool weighted = s.kind() == SpaceKind::weighted_lq;
    auto w = [&](std::size_t k) { return weighted ? s.weights()(idx_[k]) : 1.0; };
    const double q = s.q();
    if (q == 1.0) {
      for (std::size_t k = 0; k < m.size(); ++k) g[k] = w(k);
    } else if (std::isinf(q)) {
      double best = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) best = std::max(best, w(k) * m[k]);
      if (best == 0.0) return g;
      for (std::size_t k = 0; k < m.size(); ++k)
        if (w(k) * m[k] >= best * (1.0 - 1e-12)) g[k] = w(k);
    } else {
      const double n = evaluate(s, build(m)).value;
      if (n == 0.0) return g;
      for (std::size_t k = 0; k < m.size(); ++k) g[k] = w(k) * std::pow(m[k] / n, q - 1.0);
    }
    const FiniteVector gv = build(g);
    if (gv.empty()) return g;
    const double dn = koethe_dual_norm(s, gv);
    if (dn > 0.0 && std::isfinite(dn))
      for (double& v : g) v /= dn;
    return g;
  }

  SpaceSpec x_, y_;
  FiniteVector f_;
  std::vector<Index> idx_;
  std::vector<double> a_;
  bool convex_ = true;
  std::size_t evals_ = 0;
};

}  // namespace detail

/// Splits f for a Sum space using aligned decompositions
/// f1 = u sign(f), f2 = (|f| - u) sign(f), 0 <= u <= |f|.
inline SumDecomposition sum_norm_decomposition(const SpaceSpec& space, const FiniteVector& f) {
  if (space.kind() != SpaceKind::sum)
    throw InvalidArgument("sum_norm_decomposition requires a Sum space, got " + space.describe());
  return detail::SumSolver(space.left(), space.right(), f).solve();
}

inline NormValue evaluate(const SpaceSpec& space, const FiniteVector& f) {
  auto exact = [](double v) { return NormValue{v, v, v}; };
  switch (space.kind()) {
    case SpaceKind::lq:
    case SpaceKind::weighted_lq:
      return exact(detail::lq_family_norm(space, detail::entries_of(f)));
    case SpaceKind::power: {
      if (auto closed = detail::closed_form_power(space))
        return exact(detail::lq_family_norm(*closed, detail::entries_of(f)));
      const double p = space.p();
      const NormValue b = evaluate(space.base(), f.pow_abs(p));
      auto root = [p](double v) { return std::pow(v, 1.0 / p); };
      return {root(b.value), root(b.lower), root(b.upper)};
    }
    case SpaceKind::intersection: {
      const NormValue l = evaluate(space.left(), f), r = evaluate(space.right(), f);
      return {std::max(l.value, r.value), std::max(l.lower, r.lower), std::max(l.upper, r.upper)};
    }
    case SpaceKind::sum: {
      const SumDecomposition d = sum_norm_decomposition(space, f);
      return {d.value, d.lower, d.upper};
    }
  }
  return {};
}

}  // namespace optdom
