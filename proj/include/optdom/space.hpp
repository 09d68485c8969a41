#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/finite_vector.hpp"

namespace optdom {

/// Strictly positive weight sequence w_1, w_2, ... evaluated lazily and
/// cached. Copies share the cache.
class Weights {
 public:
  enum class Kind { power_decay, geometric, explicit_values };

  /// w_i = constant * i^(-exponent)
  static Weights power_decay(double exponent, double constant = 1.0) {
    if (!std::isfinite(exponent)) throw InvalidSpace("power_decay exponent must be finite");
    check_constant(constant);
    return Weights(Kind::power_decay, exponent, constant, {});
  }

  /// w_i = constant * ratio^(i-1)
  static Weights geometric(double ratio, double constant = 1.0) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw InvalidSpace("geometric ratio must be positive");
    check_constant(constant);
    return Weights(Kind::geometric, ratio, constant, {});
  }

  /// w_i = values[i-1]; indices past the end are an error.
  static Weights explicit_values(std::vector<double> values) {
    for (std::size_t k = 0; k < values.size(); ++k)
      if (!(values[k] > 0.0) || !std::isfinite(values[k]))
        throw InvalidSpace("weight " + std::to_string(k + 1) + " is not strictly positive");
    return Weights(Kind::explicit_values, 0.0, 1.0, std::move(values));
  }

  Kind kind() const { return state_->kind; }
  double parameter() const { return state_->parameter; }
  double constant() const { return state_->constant; }
  const std::vector<double>& values() const { return state_->values; }

  double operator()(Index i) const {
    State& s = *state_;
    {
      std::lock_guard lock(s.mutex);
      if (auto it = s.cache.find(i); it != s.cache.end()) return it->second;
    }
    const double w = compute(i);
    std::lock_guard lock(s.mutex);
    s.cache.emplace(i, w);
    return w;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind()) {
      case Kind::power_decay: os << "power_decay(" << parameter() << "," << constant() << ")"; break;
      case Kind::geometric: os << "geometric(" << parameter() << "," << constant() << ")"; break;
      case Kind::explicit_values: os << "explicit[" << values().size() << "]"; break;
    }
    return os.str();
  }

 private:
  struct State {
    Kind kind;
    double parameter;
    double constant;
    std::vector<double> values;
    std::mutex mutex;
    std::unordered_map<Index, double> cache;
  };

  Weights(Kind kind, double parameter, double constant, std::vector<double> values)
      : state_(std::make_shared<State>()) {
    state_->kind = kind;
    state_->parameter = parameter;
    state_->constant = constant;
    state_->values = std::move(values);
  }

  static void check_constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidSpace("weight constant must be positive");
  }

  double compute(Index i) const {
    const State& s = *state_;
    double w = 0.0;
    switch (s.kind) {
      case Kind::power_decay:
        w = s.constant * std::pow(static_cast<double>(i), -s.parameter);
        break;
      case Kind::geometric:
        w = s.constant * std::pow(s.parameter, static_cast<double>(i) - 1.0);
        break;
      case Kind::explicit_values:
        if (i == 0 || i > s.values.size())
          throw InvalidSpace("explicit weights do not cover index " + std::to_string(i));
        w = s.values[i - 1];
        break;
    }
    if (!(w > 0.0) || !std::isfinite(w))
      throw InvalidSpace("weight at index " + std::to_string(i) + " is not a positive finite number");
    return w;
  }

  std::shared_ptr<State> state_;
};

enum class SpaceKind { lq, weighted_lq, power, sum, intersection };

/// Immutable description of a sequence (quasi-)norm. Cheap to copy.
///
/// Weighted spaces use ||f|| = (sum_i w_i |f_i|^q)^(1/q), and
/// sup_i w_i |f_i| for q = inf.
class SpaceSpec {
 public:
  static SpaceSpec lq(double q) {
    check_q(q);
    auto n = std::make_shared<Node>();
    n->kind = SpaceKind::lq;
    n->q = q;
    n->has_fatou = true;
    n->sigma_order_continuous = !std::isinf(q);
    return SpaceSpec(std::move(n));
  }

  static SpaceSpec weighted_lq(double q, Weights weights) {
    check_q(q);
    auto n = std::make_shared<Node>();
    n->kind = SpaceKind::weighted_lq;
    n->q = q;
    n->weights = std::move(weights);
    n->has_fatou = true;
    n->sigma_order_continuous = !std::isinf(q);
    return SpaceSpec(std::move(n));
  }

  /// X^p = { f : |f|^p in X } with ||f|| = || |f|^p ||_X^(1/p).
  static SpaceSpec power(const SpaceSpec& base, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidSpace("power exponent p must lie in (0, inf)");
    auto n = std::make_shared<Node>();
    n->kind = SpaceKind::power;
    n->p = p;
    n->left = base.node_;
    n->has_fatou = base.has_fatou();
    n->sigma_order_continuous = base.sigma_order_continuous();
    return SpaceSpec(std::move(n));
  }

  /// X + Y with the infimum-over-representations quasi-norm.
  static SpaceSpec sum(const SpaceSpec& left, const SpaceSpec& right) {
    return binary(SpaceKind::sum, left, right);
  }

  /// X ∩ Y with ||f|| = max(||f||_X, ||f||_Y).
  static SpaceSpec intersection(const SpaceSpec& left, const SpaceSpec& right) {
    return binary(SpaceKind::intersection, left, right);
  }

  /// Copy with the Fatou flag overridden (user-declared spaces).
  SpaceSpec with_fatou(bool flag) const {
    auto n = std::make_shared<Node>(*node_);
    n->has_fatou = flag;
    return SpaceSpec(std::move(n));
  }

  SpaceKind kind() const { return node_->kind; }
  double q() const { return node_->q; }
  double p() const { return node_->p; }
  const Weights& weights() const { return *node_->weights; }
  SpaceSpec left() const { return SpaceSpec(node_->left); }
  SpaceSpec right() const { return SpaceSpec(node_->right); }
  SpaceSpec base() const { return left(); }
  bool has_fatou() const { return node_->has_fatou; }
  bool sigma_order_continuous() const { return node_->sigma_order_continuous; }

  bool is_lq_family() const { return kind() == SpaceKind::lq || kind() == SpaceKind::weighted_lq; }

  std::string describe() const {
    std::ostringstream os;
    auto qs = [](double q) { return std::isinf(q) ? std::string("inf") : fmt_num(q); };
    switch (kind()) {
      case SpaceKind::lq: os << "Lq(" << qs(q()) << ")"; break;
      case SpaceKind::weighted_lq: os << "WeightedLq(" << qs(q()) << "," << weights().describe() << ")"; break;
      case SpaceKind::power: os << "Power(" << base().describe() << "," << fmt_num(p()) << ")"; break;
      case SpaceKind::sum: os << "Sum(" << left().describe() << "," << right().describe() << ")"; break;
      case SpaceKind::intersection:
        os << "Intersection(" << left().describe() << "," << right().describe() << ")";
        break;
    }
    return os.str();
  }

 private:
  struct Node {
    SpaceKind kind = SpaceKind::lq;
    double q = 0.0;
    double p = 0.0;
    std::optional<Weights> weights;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    bool has_fatou = true;
    bool sigma_order_continuous = true;
  };

  explicit SpaceSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static void check_q(double q) {
    if (!(q > 0.0)) throw InvalidSpace("exponent q must be positive (got " + fmt_num(q) + ")");
  }

  static SpaceSpec binary(SpaceKind kind, const SpaceSpec& l, const SpaceSpec& r) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->left = l.node_;
    n->right = r.node_;
    n->has_fatou = l.has_fatou() && r.has_fatou();
    n->sigma_order_continuous = l.sigma_order_continuous() && r.sigma_order_continuous();
    return SpaceSpec(std::move(n));
  }

  static std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
  }

  std::shared_ptr<const Node> node_;
};

}  // namespace optdom
