#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/expression.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/numeric.hpp"

namespace optdom {

/// Declared decay model c * n^(-s) or c * rho^n. Used both for entries of a
/// column below the truncation (|a_ij| <= model(i) for every j) and for
/// column norms (||C_j|| <= model(j)). Never inferred from data.
struct DecayModel {
  enum class Kind { none, power_decay, geometric };
  Kind kind = Kind::none;
  double constant = 0.0;
  double exponent = 0.0;  // power_decay
  double ratio = 0.0;     // geometric

  static DecayModel none() { return {}; }
  static DecayModel power_decay(double constant, double exponent) {
    if (!(constant >= 0.0) || !std::isfinite(constant) || !std::isfinite(exponent))
      throw InvalidTailModel("power_decay needs a finite constant >= 0 and a finite exponent");
    return {Kind::power_decay, constant, exponent, 0.0};
  }
  static DecayModel geometric(double constant, double ratio) {
    if (!(constant >= 0.0) || !std::isfinite(constant) || !(ratio >= 0.0) || !(ratio < 1.0))
      throw InvalidTailModel("geometric model needs constant >= 0 and ratio in [0, 1)");
    return {Kind::geometric, constant, 0.0, ratio};
  }

  bool declared() const { return kind != Kind::none; }

  double at(Index n) const {
    switch (kind) {
      case Kind::power_decay: return constant * std::pow(static_cast<double>(n), -exponent);
      case Kind::geometric: return constant * std::pow(ratio, static_cast<double>(n));
      case Kind::none: break;
    }
    return kInf;
  }

  /// Upper bound on (sum_{k>n} at(k)^s), via the integral test for power
  /// decay. +inf when the series is not summable.
  double tail_power_sum(Index n, double s) const {
    switch (kind) {
      case Kind::power_decay: {
        const double e = exponent * s;
        if (!(e > 1.0) || n == 0) return kInf;
        return std::pow(constant, s) * std::pow(static_cast<double>(n), 1.0 - e) / (e - 1.0);
      }
      case Kind::geometric: {
        if (constant == 0.0 || ratio == 0.0) return 0.0;
        const double rs = std::pow(ratio, s);
        return std::pow(constant, s) * std::pow(ratio, s * static_cast<double>(n + 1)) / (1.0 - rs);
      }
      case Kind::none: break;
    }
    return kInf;
  }

  /// Upper bound on the Lq(q) norm of a sequence dominated by at(k), k > n.
  double lq_tail(double q, Index n) const {
    if (!declared()) throw InvalidTailModel("no tail model declared");
    if (std::isinf(q)) {
      if (kind == Kind::power_decay && exponent < 0.0)
        throw InvalidTailModel("power_decay with negative exponent is unbounded");
      return at(n + 1);
    }
    const double s = tail_power_sum(n, q);
    if (std::isinf(s))
      throw InvalidTailModel("declared tail is not q-summable for q = " + std::to_string(q));
    return std::pow(s, 1.0 / q);
  }
};

/// Declared properties of a matrix that finite probing cannot establish.
struct MatrixTraits {
  bool nonnegative = false;
  /// |a_ij| <= column_tail.at(i) for rows i beyond the truncation.
  DecayModel column_tail;
  /// ||C_j||_E <= column_norm_tail.at(j); see column_norm_tail_lq_only.
  DecayModel column_norm_tail;
  /// The column-norm model holds for every unweighted Lq codomain only.
  bool column_norm_tail_lq_only = false;
  /// Last row index that can be nonzero in column j (absent: unbounded).
  std::function<Index(Index)> column_extent;
  /// Last column index that can be nonzero in row i (absent: unbounded).
  std::function<Index(Index)> row_extent;
};

/// Sequence d_1, d_2, ... for diagonal matrices.
struct DiagonalSequence {
  enum class Kind { explicit_values, geometric, power };
  Kind kind = Kind::explicit_values;
  double constant = 1.0;
  double parameter = 0.0;  // ratio or exponent
  std::vector<double> values;

  /// d_j = constant * ratio^j
  static DiagonalSequence geometric(double ratio, double constant = 1.0) {
    return {Kind::geometric, constant, ratio, {}};
  }
  /// d_j = constant * j^exponent
  static DiagonalSequence power(double exponent, double constant = 1.0) {
    return {Kind::power, constant, exponent, {}};
  }
  static DiagonalSequence explicit_values(std::vector<double> v) {
    return {Kind::explicit_values, 1.0, 0.0, std::move(v)};
  }

  double operator()(Index j) const {
    switch (kind) {
      case Kind::geometric: return constant * std::pow(parameter, static_cast<double>(j));
      case Kind::power: return constant * std::pow(static_cast<double>(j), parameter);
      case Kind::explicit_values: return j >= 1 && j <= values.size() ? values[j - 1] : 0.0;
    }
    return 0.0;
  }
};

/// Infinite matrix M = (a_ij), i, j >= 1, given by an entry generator plus
/// declared metadata. Immutable; copies share the entry memo.
class MatrixOperator {
 public:
  using Generator = std::function<double(Index, Index)>;

  MatrixOperator(std::string name, Generator generator, MatrixTraits traits = {})
      : state_(std::make_shared<State>()) {
    state_->name = std::move(name);
    state_->generator = std::move(generator);
    state_->traits = std::move(traits);
  }

  /// a_ij, memoised. Checks declared nonnegativity opportunistically.
  double entry(Index i, Index j) const {
    if (i == 0 || j == 0) throw InvalidArgument("matrix indices start at 1");
    if (i >= (Index{1} << 32) || j >= (Index{1} << 32)) throw InvalidArgument("matrix index too large");
    const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
    State& s = *state_;
    {
      std::lock_guard lock(s.mutex);
      if (auto it = s.memo.find(key); it != s.memo.end()) return it->second;
    }
    const double v = s.generator(i, j);
    if (!std::isfinite(v))
      throw ContractError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") of " + s.name +
                          " is not finite");
    if (s.traits.nonnegative && v < 0.0)
      throw ContractError("matrix " + s.name + " is declared nonnegative but entry (" + std::to_string(i) +
                          "," + std::to_string(j) + ") = " + std::to_string(v));
    std::lock_guard lock(s.mutex);
    s.memo.emplace(key, v);
    return v;
  }

  const std::string& name() const { return state_->name; }
  bool nonnegative() const { return state_->traits.nonnegative; }
  const MatrixTraits& traits() const { return state_->traits; }
  const DecayModel& column_tail() const { return state_->traits.column_tail; }

  std::optional<Index> column_extent(Index j) const {
    if (!state_->traits.column_extent) return std::nullopt;
    return state_->traits.column_extent(j);
  }
  std::optional<Index> row_extent(Index i) const {
    if (!state_->traits.row_extent) return std::nullopt;
    return state_->traits.row_extent(i);
  }

  // Built-in generators.

  static MatrixOperator identity() {
    MatrixTraits t;
    t.nonnegative = true;
    t.column_extent = [](Index j) { return j; };
    t.row_extent = [](Index i) { return i; };
    return MatrixOperator("identity", [](Index i, Index j) { return i == j ? 1.0 : 0.0; }, std::move(t));
  }

  static MatrixOperator diagonal(DiagonalSequence d, std::optional<bool> nonnegative = std::nullopt) {
    MatrixTraits t;
    t.column_extent = [](Index j) { return j; };
    t.row_extent = [](Index i) { return i; };
    bool nonneg = d.constant >= 0.0;
    switch (d.kind) {
      case DiagonalSequence::Kind::geometric:
        nonneg = nonneg && d.parameter >= 0.0;
        if (std::abs(d.parameter) < 1.0) {
          t.column_norm_tail = DecayModel::geometric(std::abs(d.constant), std::abs(d.parameter));
          t.column_norm_tail_lq_only = true;
        }
        break;
      case DiagonalSequence::Kind::power:
        if (d.parameter < 0.0) {
          t.column_norm_tail = DecayModel::power_decay(std::abs(d.constant), -d.parameter);
          t.column_norm_tail_lq_only = true;
        }
        break;
      case DiagonalSequence::Kind::explicit_values:
        for (double v : d.values) nonneg = nonneg && v >= 0.0;
        break;
    }
    t.nonnegative = nonnegative.value_or(nonneg);
    return MatrixOperator("diagonal", [d = std::move(d)](Index i, Index j) { return i == j ? d(j) : 0.0; },
                          std::move(t));
  }

  /// a_ij = 1/i for j <= i, else 0.
  static MatrixOperator cesaro() {
    MatrixTraits t;
    t.nonnegative = true;
    t.row_extent = [](Index i) { return i; };
    t.column_tail = DecayModel::power_decay(1.0, 1.0);
    return MatrixOperator("cesaro", [](Index i, Index j) { return j <= i ? 1.0 / static_cast<double>(i) : 0.0; },
                          std::move(t));
  }

  /// a_ij = 1/(i + j - 1).
  static MatrixOperator hilbert() {
    MatrixTraits t;
    t.nonnegative = true;
    t.column_tail = DecayModel::power_decay(1.0, 1.0);
    return MatrixOperator("hilbert",
                          [](Index i, Index j) { return 1.0 / (static_cast<double>(i) + static_cast<double>(j) - 1.0); },
                          std::move(t));
  }

  /// rows x cols block (row-major), zero outside.
  static MatrixOperator dense(Index rows, Index cols, std::vector<double> row_major,
                              std::optional<bool> nonnegative = std::nullopt) {
    if (row_major.size() != rows * cols) throw InvalidArgument("dense block has wrong number of values");
    bool nonneg = true;
    for (double v : row_major) {
      if (!std::isfinite(v)) throw InvalidArgument("dense block contains a non-finite value");
      nonneg = nonneg && v >= 0.0;
    }
    MatrixTraits t;
    t.nonnegative = nonnegative.value_or(nonneg);
    t.column_extent = [rows](Index) { return rows; };
    t.row_extent = [cols](Index) { return cols; };
    auto data = std::make_shared<const std::vector<double>>(std::move(row_major));
    return MatrixOperator("dense", [data, rows, cols](Index i, Index j) {
      return i <= rows && j <= cols ? (*data)[(i - 1) * cols + (j - 1)] : 0.0;
    }, std::move(t));
  }

  /// Sparse (i, j, value) triples, zero elsewhere.
  static MatrixOperator sparse(const std::vector<std::tuple<Index, Index, double>>& triples,
                               std::optional<bool> nonnegative = std::nullopt) {
    auto data = std::make_shared<std::unordered_map<std::uint64_t, double>>();
    Index rows = 0, cols = 0;
    bool nonneg = true;
    for (const auto& [i, j, v] : triples) {
      if (i == 0 || j == 0) throw InvalidArgument("sparse entries use 1-based indices");
      if (!std::isfinite(v)) throw InvalidArgument("sparse entry is not finite");
      const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | j;
      if (!data->emplace(key, v).second)
        throw InvalidArgument("duplicate sparse entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      rows = std::max(rows, i);
      cols = std::max(cols, j);
      nonneg = nonneg && v >= 0.0;
    }
    MatrixTraits t;
    t.nonnegative = nonnegative.value_or(nonneg);
    t.column_extent = [rows](Index) { return rows; };
    t.row_extent = [cols](Index) { return cols; };
    std::shared_ptr<const std::unordered_map<std::uint64_t, double>> frozen = data;
    return MatrixOperator("sparse", [frozen](Index i, Index j) {
      auto it = frozen->find((static_cast<std::uint64_t>(i) << 32) | j);
      return it == frozen->end() ? 0.0 : it->second;
    }, std::move(t));
  }

  /// Entries from an expression in i and j.
  static MatrixOperator expression(const Expression& e, MatrixTraits traits) {
    return MatrixOperator("expr", [e](Index i, Index j) {
      return e(static_cast<double>(i), static_cast<double>(j));
    }, std::move(traits));
  }

 private:
  struct State {
    std::string name;
    Generator generator;
    MatrixTraits traits;
    std::mutex mutex;
    std::unordered_map<std::uint64_t, double> memo;
  };
  std::shared_ptr<State> state_;
};

}  // namespace optdom
