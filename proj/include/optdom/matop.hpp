#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/estimate.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/growth.hpp"
#include "optdom/matrix.hpp"
#include "optdom/numeric.hpp"
#include "optdom/parallel.hpp"
#include "optdom/seqspace.hpp"

namespace optdom {

/// Number of rows of column j that can be nonzero within the first n.
inline Index column_rows(const MatrixOperator& m, Index j, Index n) {
  const auto ext = m.column_extent(j);
  return ext ? std::min(*ext, n) : n;
}

/// (a_ij)_{i <= n}
inline FiniteVector column(const MatrixOperator& m, Index j, Index n) {
  if (j == 0 || n == 0) throw InvalidArgument("column: j and n must be positive");
  std::vector<Entry> es;
  const Index rows = column_rows(m, j, n);
  for (Index i = 1; i <= rows; ++i) {
    const double v = m.entry(i, j);
    if (v != 0.0) es.push_back({i, v});
  }
  return FiniteVector::from_entries(std::move(es));
}

/// Column j truncated to n rows; throws ContractError when it vanishes there.
inline FiniteVector nonzero_column(const MatrixOperator& m, Index j, Index n) {
  FiniteVector c = column(m, j, n);
  if (c.empty())
    throw ContractError("column " + std::to_string(j) + " of " + m.name() + " vanishes on the first " +
                        std::to_string(n) + " rows (zero columns are not supported; a larger codomain "
                        "truncation may help)");
  return c;
}

/// (a_ij)_{j <= n}, the i-th row.
inline FiniteVector row(const MatrixOperator& m, Index i, Index n) {
  if (i == 0 || n == 0) throw InvalidArgument("row: i and n must be positive");
  const auto ext = m.row_extent(i);
  const Index cols = ext ? std::min(*ext, n) : n;
  std::vector<Entry> es;
  for (Index j = 1; j <= cols; ++j) {
    const double v = m.entry(i, j);
    if (v != 0.0) es.push_back({j, v});
  }
  return FiniteVector::from_entries(std::move(es));
}

/// First n_out coordinates of Mx, row by row with compensated sums.
inline FiniteVector apply(const MatrixOperator& m, const FiniteVector& x, Index n_out) {
  std::vector<Index> limit;
  limit.reserve(x.size());
  Index rows = 0;
  for (const Entry& e : x.entries()) {
    limit.push_back(column_rows(m, e.index, n_out));
    rows = std::max(rows, limit.back());
  }
  std::vector<Entry> out;
  for (Index i = 1; i <= rows; ++i) {
    CompensatedSum s;
    std::size_t k = 0;
    for (const Entry& e : x.entries()) {
      if (i <= limit[k++]) s += m.entry(i, e.index) * e.value;
    }
    const double v = s.value();
    if (v != 0.0) out.push_back({i, v});
  }
  return FiniteVector::from_entries(std::move(out));
}

namespace detail {

/// Upper bound on ||v + t||_E where t lives on rows > n and is dominated
/// entrywise by `model`, or nullopt when E admits no bound from an entry
/// model (weighted spaces, sums). `scale` multiplies the model.
inline std::optional<double> norm_with_tail(const SpaceSpec& e, const FiniteVector& v, const DecayModel& model,
                                            Index n, double scale) {
  if (auto closed = closed_form_power(e)) return norm_with_tail(*closed, v, model, n, scale);
  switch (e.kind()) {
    case SpaceKind::lq: {
      const double q = e.q();
      const double head = norm(e, v);
      const double tail = scale * model.lq_tail(q, n);
      if (std::isinf(q)) return std::max(head, tail);
      if (tail == 0.0) return head;
      const double big = std::max(head, tail);
      return big * std::pow(std::pow(head / big, q) + std::pow(tail / big, q), 1.0 / q);
    }
    case SpaceKind::intersection: {
      auto l = norm_with_tail(e.left(), v, model, n, scale);
      auto r = norm_with_tail(e.right(), v, model, n, scale);
      if (!l || !r) return std::nullopt;
      return std::max(*l, *r);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail

/// Bracket for ||C_j||_E from the first n rows plus, when asked and
/// declared, the column tail model.
inline NormEstimate column_norm(const MatrixOperator& m, Index j, const SpaceSpec& e, Index n, bool use_tail) {
  const FiniteVector c = column(m, j, n);
  const double lower = norm(e, c);
  const auto ext = m.column_extent(j);
  if (ext && *ext <= n)
    return NormEstimate::exact_value(lower, method::truncation, "column support ends at row " +
                                                                    std::to_string(*ext));
  if (use_tail && m.column_tail().declared()) {
    if (auto upper = detail::norm_with_tail(e, c, m.column_tail(), n, 1.0))
      return NormEstimate::bracket(lower, std::max(lower, *upper), method::truncation,
                                   "first " + std::to_string(n) + " rows plus declared column tail");
    return NormEstimate::bracket(lower, kInf, method::truncation,
                                 "declared column tail does not bound norms in " + e.describe());
  }
  return NormEstimate::bracket(lower, kInf, method::truncation,
                               "first " + std::to_string(n) + " rows only; open above");
}

struct ColumnSupPoint {
  Index n = 0;
  double sup_lower = 0.0;
  double sup_upper = 0.0;
};

struct ContinuityReport {
  std::vector<NormEstimate> columns;  // columns[j-1]
  std::vector<ColumnSupPoint> series;
  GrowthFit fit;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

/// Column-norm brackets over the schedule, running sup, and growth verdict.
/// Columns are probed on the first n_rows rows.
inline ContinuityReport continuity_check(const MatrixOperator& m, const SpaceSpec& e,
                                         const std::vector<Index>& schedule, Index n_rows, bool use_tail = true) {
  if (!e.has_fatou())
    throw PreconditionError("continuity check requires a codomain with the Fatou property; " + e.describe() +
                            " is declared without it");
  if (schedule.empty()) throw InvalidArgument("continuity check needs a nonempty schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (schedule[k] <= schedule[k - 1]) throw InvalidArgument("schedule must be strictly increasing");
  if (schedule.front() == 0) throw InvalidArgument("schedule entries must be positive");
  const Index jmax = schedule.back();
  ContinuityReport r;
  r.columns.resize(jmax);
  parallel_for(jmax, [&](std::size_t k) {
    nonzero_column(m, k + 1, n_rows);
    r.columns[k] = column_norm(m, k + 1, e, n_rows, use_tail);
  });
  double lo = 0.0, hi = 0.0;
  std::size_t next = 0;
  std::vector<double> ns, vs;
  for (Index j = 1; j <= jmax; ++j) {
    lo = std::max(lo, r.columns[j - 1].lower);
    hi = std::max(hi, r.columns[j - 1].upper);
    if (next < schedule.size() && schedule[next] == j) {
      r.series.push_back({j, lo, hi});
      ns.push_back(static_cast<double>(j));
      vs.push_back(lo);
      ++next;
    }
  }
  r.fit = fit_growth(ns, vs);
  r.verdict = r.fit.verdict;
  r.note = "finite-truncation evidence from the running sup of column norms";
  return r;
}

}  // namespace optdom
