#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "optdom/error.hpp"

namespace optdom {

/// Coordinates are 1-based, matching e_1, e_2, ... in sequence spaces.
using Index = std::size_t;
/// Sorted, duplicate-free list of indices (a finite subset of N).
using IndexSet = std::vector<Index>;

struct Entry {
  Index index;
  double value;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Finitely supported real sequence in canonical form: strictly increasing
/// indices, no stored zeros. Evaluation off the support returns 0.
class FiniteVector {
 public:
  FiniteVector() = default;

  /// Sorts the entries and drops zeros. Duplicate or zero indices and
  /// non-finite values are rejected.
  static FiniteVector from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    FiniteVector v;
    v.entries_.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const Entry& e = entries[k];
      if (e.index == 0) throw InvalidArgument("FiniteVector indices start at 1");
      if (!std::isfinite(e.value))
        throw InvalidArgument("FiniteVector value at index " + std::to_string(e.index) +
                              " is not finite");
      if (k > 0 && entries[k - 1].index == e.index)
        throw InvalidArgument("duplicate index " + std::to_string(e.index));
      if (e.value != 0.0) v.entries_.push_back(e);
    }
    return v;
  }

  /// values[k] is stored at index first + k.
  static FiniteVector from_dense(std::span<const double> values, Index first = 1) {
    std::vector<Entry> es;
    es.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) es.push_back({first + k, values[k]});
    return from_entries(std::move(es));
  }

  static FiniteVector from_dense(std::initializer_list<double> values) {
    return from_dense(std::span<const double>(values.begin(), values.size()));
  }

  /// e_n = indicator of {n}.
  static FiniteVector unit(Index n, double value = 1.0) { return from_entries({{n, value}}); }

  static FiniteVector indicator(const IndexSet& set) {
    std::vector<Entry> es;
    es.reserve(set.size());
    for (Index i : set) es.push_back({i, 1.0});
    return from_entries(std::move(es));
  }

  double operator[](Index i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, Index k) { return e.index < k; });
    return (it != entries_.end() && it->index == i) ? it->value : 0.0;
  }

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Index max_index() const { return entries_.empty() ? 0 : entries_.back().index; }

  IndexSet support() const {
    IndexSet s;
    s.reserve(entries_.size());
    for (const Entry& e : entries_) s.push_back(e.index);
    return s;
  }

  /// Values at positions 1..n.
  std::vector<double> dense(Index n) const {
    std::vector<double> out(n, 0.0);
    for (const Entry& e : entries_)
      if (e.index <= n) out[e.index - 1] = e.value;
    return out;
  }

  FiniteVector abs() const {
    FiniteVector r = *this;
    for (Entry& e : r.entries_) e.value = std::abs(e.value);
    return r;
  }

  /// |f|^p entrywise. Throws RangeError when a power overflows or
  /// underflows to zero, naming the index.
  FiniteVector pow_abs(double p) const {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("power exponent must lie in (0, inf)");
    FiniteVector r = *this;
    for (Entry& e : r.entries_) {
      const double v = std::pow(std::abs(e.value), p);
      if (!std::isfinite(v)) throw RangeError("|f|^p overflows", e.index);
      if (v == 0.0) throw RangeError("|f|^p underflows to zero", e.index);
      e.value = v;
    }
    return r;
  }

  FiniteVector scaled(double alpha) const {
    if (!std::isfinite(alpha)) throw InvalidArgument("scale factor is not finite");
    if (alpha == 0.0) return {};
    std::vector<Entry> es(entries_);
    for (Entry& e : es) e.value *= alpha;
    return from_entries(std::move(es));
  }

  /// f * indicator(A).
  FiniteVector restricted(const IndexSet& set) const {
    FiniteVector r;
    for (const Entry& e : entries_)
      if (std::binary_search(set.begin(), set.end(), e.index)) r.entries_.push_back(e);
    return r;
  }

  /// Coordinates 1..n only.
  FiniteVector truncated(Index n) const {
    FiniteVector r;
    for (const Entry& e : entries_)
      if (e.index <= n) r.entries_.push_back(e);
    return r;
  }

  friend FiniteVector operator+(const FiniteVector& a, const FiniteVector& b) {
    return combine(a, b, 1.0);
  }
  friend FiniteVector operator-(const FiniteVector& a, const FiniteVector& b) {
    return combine(a, b, -1.0);
  }
  friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

 private:
  static FiniteVector combine(const FiniteVector& a, const FiniteVector& b, double sign) {
    FiniteVector r;
    std::size_t i = 0, k = 0;
    auto push = [&r](Index idx, double v) {
      if (v != 0.0) r.entries_.push_back({idx, v});
    };
    while (i < a.entries_.size() || k < b.entries_.size()) {
      if (k == b.entries_.size() ||
          (i < a.entries_.size() && a.entries_[i].index < b.entries_[k].index)) {
        push(a.entries_[i].index, a.entries_[i].value);
        ++i;
      } else if (i == a.entries_.size() || b.entries_[k].index < a.entries_[i].index) {
        push(b.entries_[k].index, sign * b.entries_[k].value);
        ++k;
      } else {
        push(a.entries_[i].index, a.entries_[i].value + sign * b.entries_[k].value);
        ++i;
        ++k;
      }
    }
    return r;
  }

  std::vector<Entry> entries_;
};

inline IndexSet make_index_set(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (!v.empty() && v.front() == 0) throw InvalidArgument("index sets are subsets of {1, 2, ...}");
  return v;
}

/// {1, ..., n}
inline IndexSet first_indices(Index n) {
  IndexSet s(n);
  for (Index i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

}  // namespace optdom
