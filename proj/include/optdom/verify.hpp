#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "optdom/analysis.hpp"
#include "optdom/factor.hpp"
#include "optdom/matop.hpp"
#include "optdom/oracle.hpp"
#include "optdom/seqspace.hpp"
#include "optdom/vmeasure.hpp"

namespace optdom::verify {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double seconds = 0.0;
  std::string detail;  // first failure, or a summary value

  bool passed() const { return cases > 0 && failures == 0; }
};

/// Instance counts per check. `full()` uses the acceptance sizes.
struct Scale {
  std::size_t young = 10000;
  std::size_t nonnegative = 40;
  std::size_t sandwich = 40;
  std::size_t contraction = 20;
  std::size_t domination = 10;
  std::size_t sum_instances = 10;
  std::size_t sum_decompositions = 1000;
  std::size_t identities = 200;
  std::size_t extension = 200;
  std::size_t dual = 20;
  std::size_t axiom_samples = 2000;

  static Scale quick() { return {}; }
  static Scale full() { return {100000, 200, 200, 100, 100, 50, 1000, 1000, 1000, 100, 20000}; }
};

namespace detail {

/// Records failures; keeps the first message.
class Tally {
 public:
  explicit Tally(std::string name) : start_(std::chrono::steady_clock::now()) { r_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& message) {
    ++r_.cases;
    if (ok) return;
    if (r_.failures++ == 0) r_.detail = message();
  }
  void note(std::string s) {
    if (r_.failures == 0) r_.detail = std::move(s);
  }
  CheckResult finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return r_;
  }

 private:
  CheckResult r_;
  std::chrono::steady_clock::time_point start_;
};

inline std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Dense rows x cols matrix with about 20% zeros and no zero column.
inline MatrixOperator random_matrix(Rng& rng, Index rows, Index cols, bool nonnegative) {
  std::vector<double> a(rows * cols);
  auto draw = [&] { return nonnegative ? rng.uniform(0.05, 2.0) : rng.uniform(0.05, 2.0) * (rng.coin() ? 1.0 : -1.0); };
  for (double& v : a) v = rng.uniform() < 0.2 ? 0.0 : draw();
  for (Index j = 0; j < cols; ++j) {
    bool zero = true;
    for (Index i = 0; i < rows; ++i) zero = zero && a[i * cols + j] == 0.0;
    if (zero) a[rng.below(rows) * cols + j] = draw();
  }
  return MatrixOperator::dense(rows, cols, std::move(a), nonnegative ? std::optional<bool>(true) : std::nullopt);
}

/// Random vector with every entry of [1, n] nonzero.
inline FiniteVector random_full_vector(Rng& rng, Index n, bool nonnegative) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = rng.uniform(0.05, 3.0);
    if (!nonnegative && rng.coin()) x = -x;
  }
  return FiniteVector::from_dense(std::span<const double>(v));
}

inline SpaceSpec random_lq(Rng& rng, bool allow_quasi) {
  static const double qs[] = {1.0, 1.5, 2.0, 3.0, kInf, 0.5, 0.75};
  return SpaceSpec::lq(qs[rng.below(allow_quasi ? 7 : 5)]);
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

inline std::vector<std::vector<Index>> all_subsets(const IndexSet& s) {
  std::vector<std::vector<Index>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s.size()); ++mask) {
    std::vector<Index> a;
    for (std::size_t k = 0; k < s.size(); ++k)
      if ((mask >> k) & 1u) a.push_back(s[k]);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace detail

/// Young's inequality on random inputs, plus equality detection when a^s = b^t.
inline CheckResult young_sweep(std::size_t count, std::uint64_t seed) {
  detail::Tally t("young inequality");
  Rng rng(seed, "young");
  for (std::size_t k = 0; k < count; ++k) {
    const double a = rng.uniform(0.0, 10.0), b = rng.uniform(0.0, 10.0);
    const double s = rng.uniform(0.1, 10.0), u = rng.uniform(0.1, 10.0);
    t.check(oracle::young_check(a, b, s, u), [&] {
      return "fails at a=" + detail::str(a) + " b=" + detail::str(b) + " s=" + detail::str(s) + " t=" + detail::str(u);
    });
  }
  Rng eq(seed, "young-equality");
  for (std::size_t k = 0; k < std::max<std::size_t>(count / 100, 10); ++k) {
    const double a = eq.uniform(0.1, 3.0), s = eq.uniform(0.1, 10.0), u = eq.uniform(0.1, 10.0);
    const double b = std::pow(a, s / u);
    const double gap = oracle::young_gap(a, b, s, u);
    t.check(std::abs(gap) <= 1e-9, [&] { return "equality case a^s = b^t has gap " + detail::str(gap); });
  }
  return t.finish();
}

/// Nonnegative atoms: the L1(m) norm is ||M|f|||_E, checked against apply and
/// against full sign enumeration.
inline CheckResult nonnegative_reduction(std::size_t count, std::uint64_t seed) {
  detail::Tally t("nonnegative reduction");
  Rng rng(seed, "nonnegative-reduction");
  const SpaceSpec spaces[] = {SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), SpaceSpec::lq(kInf)};
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(12), rows = 1 + rng.below(12);
    const MatrixOperator m = detail::random_matrix(rng, rows, n, true);
    const FiniteVector f = detail::random_full_vector(rng, n, true);
    for (const SpaceSpec& e : spaces) {
      const AtomicVectorMeasure mu(m, e, rows);
      const NormEstimate est = l1m_norm(mu, f);
      const double reduced = norm(e, apply(m, f, rows));
      const double enumerated = optdom::detail::enumerate_patterns(optdom::detail::AtomBlock(mu, f), e).value;
      t.check(est.exact() && detail::rel_gap(*est.value, reduced) <= 1e-12 &&
                  detail::rel_gap(enumerated, reduced) <= 1e-12,
              [&] {
                return "n=" + std::to_string(n) + " E=" + e.describe() + ": l1m " + detail::str(est.upper) +
                       " vs ||M|f||| " + detail::str(reduced) + " vs enumeration " + detail::str(enumerated);
              });
    }
  }
  return t.finish();
}

/// Subset sandwich S <= ||f||_{L1(m)} <= 2 S on random signed matrices.
inline CheckResult sandwich(std::size_t count, std::uint64_t seed) {
  detail::Tally t("subset sandwich");
  Rng rng(seed, "sandwich");
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(12), rows = 1 + rng.below(12);
    const MatrixOperator m = detail::random_matrix(rng, rows, n, false);
    const FiniteVector f = detail::random_full_vector(rng, n, false);
    const SpaceSpec e = detail::random_lq(rng, false);
    const AtomicVectorMeasure mu(m, e, rows);
    const double s = oracle::exhaustive_subset_sup(mu, f);
    const NormEstimate est = l1m_norm(mu, f);
    const double v = est.value.value_or(-1.0);
    t.check(est.exact() && s <= v * (1.0 + 1e-12) && v <= 2.0 * s * (1.0 + 1e-12), [&] {
      return "n=" + std::to_string(n) + " E=" + e.describe() + ": S=" + detail::str(s) + " N=" + detail::str(v);
    });
  }
  return t.finish();
}

/// ||integrate(m, f, A)||_E <= ||f||_{L1(m)} for every A in supp f.
inline CheckResult contraction(std::size_t count, std::uint64_t seed) {
  detail::Tally t("integration contraction");
  Rng rng(seed, "contraction");
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(10), rows = 1 + rng.below(10);
    const MatrixOperator m = detail::random_matrix(rng, rows, n, rng.below(4) == 0);
    const FiniteVector f = detail::random_full_vector(rng, n, false);
    const SpaceSpec e = detail::random_lq(rng, false);
    const AtomicVectorMeasure mu(m, e, rows);
    const double v = l1m_norm(mu, f).upper;
    double worst = 0.0;
    for (const auto& a : detail::all_subsets(f.support())) worst = std::max(worst, norm(e, integrate(mu, f, a)));
    t.check(worst <= v + 1e-9, [&] {
      return "n=" + std::to_string(n) + ": subset integral " + detail::str(worst) + " exceeds N=" + detail::str(v);
    });
  }
  return t.finish();
}

/// Identity into Lq(q) from Lq(p): n^max(0, 1/q - 1/p) within 2%; diagonal
/// into Lq(1): (sum_{j<=n} d_j^p')^(1/p') within 1%.
inline CheckResult closed_form_constants(std::uint64_t seed) {
  detail::Tally t("closed-form constants");
  FactorOptions fo;
  fo.ascent.seed = derive_seed(seed, "closed-form");
  const std::pair<double, double> pq[] = {{2.0, 1.0}, {2.0, 2.0}, {3.0, 1.0}, {2.0, 1.5}, {3.0, 2.0}, {1.5, 3.0}};
  const Index ns[] = {2, 4, 8, 16};
  const MatrixOperator id = MatrixOperator::identity();
  for (const auto& [p, q] : pq) {
    for (Index n : ns) {
      const double c = best_constant(id, SpaceSpec::lq(q), SpaceSpec::lq(p), n, n, fo).value;
      const double want = std::pow(static_cast<double>(n), std::max(0.0, 1.0 / q - 1.0 / p));
      t.check(std::abs(c - want) <= 0.02 * want, [&] {
        return "identity p=" + detail::str(p) + " q=" + detail::str(q) + " n=" + std::to_string(n) + ": " +
               detail::str(c) + " vs " + detail::str(want);
      });
    }
  }
  const double c4 = best_constant(id, SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), 4, 4, fo).value;
  t.check(std::abs(c4 - 2.0) <= 0.02 * 2.0, [&] { return "identity p=2 q=1 n=4: " + detail::str(c4) + " vs 2"; });

  const DiagonalSequence ds[] = {DiagonalSequence::geometric(0.5), DiagonalSequence::power(-1.0),
                                 DiagonalSequence::explicit_values({3.0, 1.0, 2.0, 0.5, 4.0, 1.5, 0.25, 1.0})};
  for (const DiagonalSequence& d : ds) {
    const MatrixOperator m = MatrixOperator::diagonal(d);
    for (double p : {2.0, 3.0, 1.5}) {
      const double pd = conjugate_exponent(p);
      for (Index n : ns) {
        if (d.kind == DiagonalSequence::Kind::explicit_values && n > d.values.size()) continue;
        CompensatedSum sum;
        for (Index j = 1; j <= n; ++j) sum += std::pow(std::abs(d(j)), pd);
        const double want = std::pow(sum.value(), 1.0 / pd);
        const double c = best_constant(m, SpaceSpec::lq(1.0), SpaceSpec::lq(p), n, n, fo).value;
        t.check(std::abs(c - want) <= 0.01 * want, [&] {
          return "diagonal p=" + detail::str(p) + " n=" + std::to_string(n) + ": " + detail::str(c) + " vs " +
                 detail::str(want);
        });
      }
    }
  }
  return t.finish();
}

/// Ascent lower bounds against the simplex-grid oracle for n <= 4.
inline CheckResult ascent_vs_grid(std::size_t count, std::uint64_t seed) {
  detail::Tally t("ascent vs grid oracle");
  Rng rng(seed, "ascent-grid");
  FactorOptions fo;
  fo.ascent.seed = derive_seed(seed, "ascent-grid", 1);
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(4), rows = 1 + rng.below(6);
    const MatrixOperator m = detail::random_matrix(rng, rows, n, rng.coin());
    const SpaceSpec e = detail::random_lq(rng, false);
    const SpaceSpec domain = SpaceSpec::lq(1.25 + rng.uniform(0.0, 2.0));
    const double a = best_constant(m, e, domain, n, rows, fo).value;
    const double g = oracle::grid_best_constant(m, e, domain, n, rows, 32);
    t.check(a >= 0.99 * g, [&] {
      return "n=" + std::to_string(n) + " E=" + e.describe() + ": ascent " + detail::str(a) + " < grid " +
             detail::str(g);
    });
  }
  return t.finish();
}

/// D <= 2B and B <= 2^(1/r) D for r in {1/2, 1/3}; identity into Lq(1) with
/// r = 1/2, n = 2 gives D = 2.
inline CheckResult domination(std::size_t count, std::uint64_t seed) {
  detail::Tally t("domination inequalities");
  Rng rng(seed, "domination");
  FactorOptions fo;
  fo.ascent.seed = derive_seed(seed, "domination");
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(8), rows = 1 + rng.below(8);
    const MatrixOperator m = detail::random_matrix(rng, rows, n, true);
    const SpaceSpec e = detail::random_lq(rng, false);
    for (double r : {0.5, 1.0 / 3.0}) {
      const DominationCheck c = domination_embedding_check(m, e, r, n, rows, fo);
      t.check(c.first_half_ok && c.second_half_ok, [&] {
        return "n=" + std::to_string(n) + " E=" + e.describe() + " r=" + detail::str(r) + ": D=" +
               detail::str(c.D.value) + " B=" + detail::str(c.B.value);
      });
    }
  }
  const double d = power_domination_constant(MatrixOperator::identity(), SpaceSpec::lq(1.0), 0.5, 2, 2, fo).value;
  t.check(std::abs(d - 2.0) <= 0.02, [&] { return "identity into Lq(1), r=1/2, n=2: D=" + detail::str(d); });
  return t.finish();
}

/// Sum-norm solver against random decompositions and the aligned grid.
inline CheckResult sum_norm_optimality(std::size_t instances, std::size_t decompositions, std::uint64_t seed) {
  detail::Tally t("sum-norm optimality");
  Rng rng(seed, "sum-norm");
  auto random_space = [&]() {
    if (rng.below(4) == 0) return SpaceSpec::weighted_lq(rng.coin() ? 1.0 : 2.0, Weights::power_decay(-rng.uniform(0.0, 1.0)));
    return detail::random_lq(rng, true);
  };
  std::vector<std::tuple<SpaceSpec, SpaceSpec, FiniteVector>> cases;
  cases.emplace_back(SpaceSpec::lq(1.0), SpaceSpec::lq(kInf), FiniteVector::from_dense({2.0, 1.0}));
  while (cases.size() < instances) {
    const Index len = 1 + rng.below(4);
    std::vector<Entry> es;
    Index at = 0;
    for (Index i = 1; i <= len; ++i) {
      at += 1 + rng.below(3);
      es.push_back({at, rng.uniform(0.1, 3.0) * (rng.coin() ? 1.0 : -1.0)});
    }
    cases.emplace_back(random_space(), random_space(), FiniteVector::from_entries(es));
  }
  bool first = true;
  for (const auto& [x, y, f] : cases) {
    const double v = norm(SpaceSpec::sum(x, y), f);
    if (first) {
      t.check(std::abs(v - 2.0) <= 1e-9, [&] { return "Sum(Lq(1), Lq(inf)) at (2,1): " + detail::str(v); });
      first = false;
    }
    const double brute = oracle::sum_norm_bruteforce(x, y, f, 64);
    const double mod = oracle::grid_modulus(x, y, f, 64);
    const double eps = 1e-8 * std::max(1.0, v);
    t.check(brute >= v - eps && brute <= v + mod + eps, [&] {
      return "X=" + x.describe() + " Y=" + y.describe() + ": solver " + detail::str(v) + " grid " +
             detail::str(brute) + " modulus " + detail::str(mod);
    });
    double worst = kInf;
    for (std::size_t d = 0; d < decompositions; ++d) {
      std::vector<Entry> g;
      for (const Entry& e : f.entries()) {
        const int mode = static_cast<int>(rng.below(4));
        const double u = mode == 0 ? 0.0 : mode == 1 ? e.value : e.value * rng.uniform(-0.5, 1.5);
        g.push_back({e.index, u});
      }
      const FiniteVector gx = FiniteVector::from_entries(g);
      worst = std::min(worst, norm(x, gx) + norm(y, f - gx));
    }
    t.check(v <= worst + eps, [&] {
      return "X=" + x.describe() + " Y=" + y.describe() + ": solver " + detail::str(v) +
             " above a random decomposition " + detail::str(worst);
    });
  }
  return t.finish();
}

/// Power(Lq(1), p) = Lq(p), intersection = max, and the observed triangle
/// constant never exceeds the declared one.
inline CheckResult space_identities(std::size_t count, std::size_t axiom_samples, std::uint64_t seed) {
  detail::Tally t("space identities");
  Rng rng(seed, "space-identities");
  for (std::size_t k = 0; k < count; ++k) {
    const Index len = 1 + rng.below(8);
    std::vector<Entry> es;
    for (Index i = 1; i <= len; ++i)
      if (rng.below(4) != 0) es.push_back({i, rng.uniform(-5.0, 5.0)});
    const FiniteVector f = FiniteVector::from_entries(es);
    for (double p : {0.5, 2.0, 3.0}) {
      const double a = norm(SpaceSpec::power(SpaceSpec::lq(1.0), p), f), b = norm(SpaceSpec::lq(p), f);
      t.check(a == b, [&] { return "Power(Lq(1), " + detail::str(p) + "): " + detail::str(a) + " vs " + detail::str(b); });
    }
    const SpaceSpec x = detail::random_lq(rng, true), y = detail::random_lq(rng, true);
    const double i = norm(SpaceSpec::intersection(x, y), f), mx = std::max(norm(x, f), norm(y, f));
    t.check(i == mx, [&] { return "Intersection(" + x.describe() + ", " + y.describe() + "): " + detail::str(i); });
  }
  const SpaceSpec spaces[] = {SpaceSpec::lq(2.0),
                              SpaceSpec::lq(0.5),
                              SpaceSpec::lq(1.0 / 3.0),
                              SpaceSpec::lq(kInf),
                              SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)),
                              SpaceSpec::power(SpaceSpec::lq(2.0), 0.5),
                              SpaceSpec::weighted_lq(0.5, Weights::geometric(0.5)),
                              SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(kInf))};
  for (std::size_t k = 0; k < std::size(spaces); ++k) {
    const SpaceSpec& s = spaces[k];
    const double observed = oracle::quasinorm_axiom_scan(s, axiom_samples, derive_seed(seed, "axiom-scan", k));
    const double declared = quasinorm_constant(s);
    t.check(observed <= declared + 1e-9, [&] {
      return s.describe() + ": observed K " + detail::str(observed) + " > declared " + detail::str(declared);
    });
  }
  const double half = oracle::quasinorm_axiom_scan(SpaceSpec::lq(0.5), 0, seed);
  t.check(half >= 1.9, [&] { return "Lq(1/2) scan reached only " + detail::str(half); });
  return t.finish();
}

/// integrate(m, f) = apply(M, f) on random dense and built-in matrices.
inline CheckResult extension(std::size_t count, std::uint64_t seed) {
  detail::Tally t("extension consistency");
  Rng rng(seed, "extension");
  const MatrixOperator builtins[] = {MatrixOperator::cesaro(), MatrixOperator::hilbert(),
                                     MatrixOperator::diagonal(DiagonalSequence::geometric(0.5))};
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(12), rows = 1 + rng.below(12);
    const bool builtin = rng.below(4) == 0;
    const MatrixOperator m = builtin ? builtins[rng.below(3)] : detail::random_matrix(rng, rows, n, rng.coin());
    const FiniteVector f = detail::random_full_vector(rng, n, false);
    const Index n_E = builtin ? 16 + rng.below(16) : rows;
    t.check(extension_consistency(m, SpaceSpec::lq(2.0), f, n_E), [&] {
      return m.name() + " n=" + std::to_string(n) + ": integrate and apply differ";
    });
  }
  return t.finish();
}

/// Dual sampling never exceeds the exact norm, and is exact on one atom.
inline CheckResult dual_sampling(std::size_t count, std::uint64_t seed) {
  detail::Tally t("dual sampling");
  Rng rng(seed, "dual-sampling");
  double gap_sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const Index n = 1 + rng.below(12), rows = 1 + rng.below(12);
    const MatrixOperator m = detail::random_matrix(rng, rows, n, false);
    const SpaceSpec e = detail::random_lq(rng, false);
    const AtomicVectorMeasure mu(m, e, rows);
    const FiniteVector f = detail::random_full_vector(rng, n, false);
    const double exact = *l1m_norm(mu, f).value;
    const double sampled = oracle::l1m_norm_dual_sample(mu, f, 2000, derive_seed(seed, "dual", k));
    gap_sum += (exact - sampled) / exact;
    t.check(sampled <= exact * (1.0 + 1e-12), [&] {
      return "E=" + e.describe() + ": sampled " + detail::str(sampled) + " > exact " + detail::str(exact);
    });
    const FiniteVector one = FiniteVector::unit(1 + rng.below(n), rng.uniform(0.5, 2.0));
    const double so = oracle::l1m_norm_dual_sample(mu, one, 0, seed);
    const double eo = *l1m_norm(mu, one).value;
    t.check(detail::rel_gap(so, eo) <= 1e-12, [&] {
      return "single atom, E=" + e.describe() + ": " + detail::str(so) + " vs " + detail::str(eo);
    });
  }
  t.note("mean relative gap " + detail::str(count ? gap_sum / static_cast<double>(count) : 0.0));
  return t.finish();
}

/// Series pipelines with known limits.
inline CheckResult condition_pipelines() {
  detail::Tally t("condition pipelines");
  const MatrixOperator diag = MatrixOperator::diagonal(DiagonalSequence::geometric(0.5));
  const ConditionIResult c1 = condition_I(diag, SpaceSpec::lq(1.0), 2.0, 64, 64);
  const double s1 = c1.partial_lower.empty() ? -1.0 : c1.partial_lower.back();
  t.check(std::abs(s1 - 1.0 / 3.0) <= 1e-6 && c1.verdict == SeriesVerdict::converges,
          [&] { return "diagonal 2^-j, p=2: partial sum " + detail::str(s1) + ", " + to_string(c1.verdict); });

  MatrixTraits traits;
  traits.nonnegative = true;
  traits.row_extent = [](Index i) { return i; };
  const MatrixOperator rows = MatrixOperator::expression(Expression("(j <= i) * 2^(-i)"), traits);
  const RowsConditionResult r = rows_condition(rows, 1.0, 64, 64);
  const double s2 = r.partial_sums.empty() ? -1.0 : r.partial_sums.back();
  t.check(std::abs(s2 - 2.0) <= 1e-6 && r.verdict == SeriesVerdict::converges,
          [&] { return "rows 2^-i, q=1: partial sum " + detail::str(s2) + ", " + to_string(r.verdict); });

  const RowsConditionResult c = rows_condition(MatrixOperator::cesaro(), 1.0, 64, 64);
  t.check(c.verdict == SeriesVerdict::diverges, [&] { return "Cesaro rows, q=1: " + to_string(c.verdict); });
  return t.finish();
}

/// Two in-process analyze runs with one seed give identical reports.
inline CheckResult report_determinism(std::uint64_t seed) {
  detail::Tally t("report determinism");
  AnalysisConfig cfg;
  cfg.matrix = {{"kind", "diagonal"}, {"params", {{"kind", "geometric"}, {"ratio", 0.5}}}};
  cfg.codomain = {{"variant", "lq"}, {"q", 1.0}};
  cfg.schedule = {2, 4, 8};
  cfg.n_E = 16;
  cfg.series_terms = 16;
  cfg.seed = seed;
  cfg.probes = {FiniteVector::from_dense({1.0, -2.0, 0.5})};
  const std::string a = run_analyze(cfg).report.dump(2), b = run_analyze(cfg).report.dump(2);
  t.check(a == b, [] { return std::string("reports differ"); });
  return t.finish();
}

/// Checks on a user-supplied matrix and codomain: extension consistency,
/// ascent against the grid oracle for n <= 4 (domain Lq(2)), and, for a
/// normed codomain, the subset sandwich and contraction on random vectors.
inline std::vector<CheckResult> matrix_checks(const MatrixOperator& m, const SpaceSpec& e, Index n_E,
                                              std::size_t count, std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed, "user-matrix");
  {
    detail::Tally t("extension consistency (" + m.name() + ")");
    for (std::size_t k = 0; k < count; ++k) {
      const FiniteVector f = detail::random_full_vector(rng, 1 + rng.below(8), false);
      t.check(extension_consistency(m, e, f, n_E), [&] { return "integrate and apply differ at n=" + std::to_string(f.size()); });
    }
    out.push_back(t.finish());
  }
  {
    detail::Tally t("ascent vs grid oracle (" + m.name() + ")");
    FactorOptions fo;
    fo.ascent.seed = derive_seed(seed, "user-ascent");
    for (Index n = 1; n <= 4; ++n) {
      const double a = best_constant(m, e, SpaceSpec::lq(2.0), n, n_E, fo).value;
      const double g = oracle::grid_best_constant(m, e, SpaceSpec::lq(2.0), n, n_E, 32);
      t.check(a >= 0.99 * g, [&] { return "n=" + std::to_string(n) + ": ascent " + detail::str(a) + " < grid " + detail::str(g); });
    }
    out.push_back(t.finish());
  }
  if (quasinorm_constant(e) == 1.0) {
    detail::Tally t("subset sandwich and contraction (" + m.name() + ")");
    const AtomicVectorMeasure mu(m, e, n_E);
    for (std::size_t k = 0; k < count; ++k) {
      const Index n = 1 + rng.below(8);
      bool zero = false;
      for (Index j = 1; j <= n; ++j) zero = zero || column(m, j, n_E).empty();
      if (zero) continue;
      const FiniteVector f = detail::random_full_vector(rng, n, false);
      const double v = l1m_norm(mu, f).upper;
      const double s = oracle::exhaustive_subset_sup(mu, f);
      t.check(s <= v * (1.0 + 1e-12) + 1e-12 && v <= 2.0 * s * (1.0 + 1e-12) + 1e-12, [&] {
        return "n=" + std::to_string(n) + ": S=" + detail::str(s) + " N=" + detail::str(v);
      });
    }
    out.push_back(t.finish());
  }
  return out;
}

/// Every check at the given scale.
inline std::vector<CheckResult> run_suite(const Scale& s, std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(young_sweep(s.young, seed));
  out.push_back(nonnegative_reduction(s.nonnegative, seed));
  out.push_back(sandwich(s.sandwich, seed));
  out.push_back(contraction(s.contraction, seed));
  out.push_back(closed_form_constants(seed));
  out.push_back(ascent_vs_grid(s.domination, seed));
  out.push_back(domination(s.domination, seed));
  out.push_back(sum_norm_optimality(s.sum_instances, s.sum_decompositions, seed));
  out.push_back(space_identities(s.identities, s.axiom_samples, seed));
  out.push_back(extension(s.extension, seed));
  out.push_back(dual_sampling(s.dual, seed));
  out.push_back(condition_pipelines());
  out.push_back(report_determinism(seed));
  return out;
}

}  // namespace optdom::verify
