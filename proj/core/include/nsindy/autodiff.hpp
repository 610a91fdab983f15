#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nsindy/dictionary.hpp"
#include "nsindy/params.hpp"

namespace nsindy {

/// Reverse-mode tape. Each node stores at most two parents with the local
/// partial derivatives; leaves have no parents. A tape records one
/// evaluation only and is installed per thread through Tape::Scope.
class Tape {
 public:
  struct Node {
    std::int32_t lhs;
    std::int32_t rhs;
    double d_lhs;
    double d_rhs;
  };

  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  void reserve(std::size_t n) { nodes_.reserve(n); }
  void clear() { nodes_.clear(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::int32_t leaf() { return push({-1, -1, 0.0, 0.0}); }
  std::int32_t unary(std::int32_t a, double da) { return push({a, -1, da, 0.0}); }
  std::int32_t binary(std::int32_t a, double da, std::int32_t b, double db) { return push({a, b, da, db}); }

  /// Adjoints of every node with respect to `output`.
  std::vector<double> adjoints(std::int32_t output) const;
  void adjoints(std::int32_t output, std::vector<double>& adj) const;

  static Tape* active() noexcept { return current_; }

 private:
  std::int32_t push(const Node& n) {
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  static thread_local Tape* current_;
};

/// Differentiable scalar. Index -1 marks a constant that is never recorded.
class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  Var(double v, std::int32_t index) : value_(v), index_(index) {}

  double value() const noexcept { return value_; }
  std::int32_t index() const noexcept { return index_; }
  bool is_constant() const noexcept { return index_ < 0; }

  Var& operator+=(const Var& o) { return *this = *this + o; }
  Var& operator-=(const Var& o) { return *this = *this - o; }
  Var& operator*=(const Var& o) { return *this = *this * o; }

  friend Var operator+(const Var& a, const Var& b) {
    const double v = a.value_ + b.value_;
    if (a.is_constant() && b.is_constant()) return Var(v);
    Tape& t = *Tape::active();
    if (a.is_constant()) return Var(v, t.unary(b.index_, 1.0));
    if (b.is_constant()) return Var(v, t.unary(a.index_, 1.0));
    return Var(v, t.binary(a.index_, 1.0, b.index_, 1.0));
  }
  friend Var operator-(const Var& a, const Var& b) {
    const double v = a.value_ - b.value_;
    if (a.is_constant() && b.is_constant()) return Var(v);
    Tape& t = *Tape::active();
    if (a.is_constant()) return Var(v, t.unary(b.index_, -1.0));
    if (b.is_constant()) return Var(v, t.unary(a.index_, 1.0));
    return Var(v, t.binary(a.index_, 1.0, b.index_, -1.0));
  }
  friend Var operator*(const Var& a, const Var& b) {
    const double v = a.value_ * b.value_;
    if (a.is_constant() && b.is_constant()) return Var(v);
    Tape& t = *Tape::active();
    if (a.is_constant()) return Var(v, t.unary(b.index_, a.value_));
    if (b.is_constant()) return Var(v, t.unary(a.index_, b.value_));
    return Var(v, t.binary(a.index_, b.value_, b.index_, a.value_));
  }
  friend Var operator/(const Var& a, const Var& b) {
    const double v = a.value_ / b.value_;
    if (a.is_constant() && b.is_constant()) return Var(v);
    Tape& t = *Tape::active();
    const double inv = 1.0 / b.value_;
    if (a.is_constant()) return Var(v, t.unary(b.index_, -v * inv));
    if (b.is_constant()) return Var(v, t.unary(a.index_, inv));
    return Var(v, t.binary(a.index_, inv, b.index_, -v * inv));
  }
  friend Var operator-(const Var& a) {
    if (a.is_constant()) return Var(-a.value_);
    return Var(-a.value_, Tape::active()->unary(a.index_, -1.0));
  }

 private:
  double value_ = 0.0;
  std::int32_t index_ = -1;
};

/// Node with a caller-supplied value and local derivative.
inline Var apply_unary(const Var& x, double value, double derivative) {
  if (x.is_constant()) return Var(value);
  return Var(value, Tape::active()->unary(x.index(), derivative));
}

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Var& x) noexcept { return x.value(); }

/// |x| with the sign(0) = 0 subgradient.
inline double abs_of(double x) { return std::abs(x); }
inline Var abs_of(const Var& x) {
  const double v = x.value();
  return apply_unary(x, std::abs(v), v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
}

inline double square_of(double x) { return x * x; }
inline Var square_of(const Var& x) { return apply_unary(x, x.value() * x.value(), 2.0 * x.value()); }

inline double basis_apply(const BasisFunction& f, double x) { return f.value(x); }
inline Var basis_apply(const BasisFunction& f, const Var& x) {
  return apply_unary(x, f.value(x.value()), f.derivative(x.value()));
}

/// Thrown when a differentiated loss evaluates to inf/nan.
class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(double loss, std::vector<double> parameters);
  double loss() const noexcept { return loss_; }
  const std::vector<double>& parameters() const noexcept { return parameters_; }

 private:
  double loss_;
  std::vector<double> parameters_;
};

/// Loss over the flat parameter vector, written against Var. Masked
/// coordinates are passed as constant zeros.
using VarLoss = std::function<Var(std::span<const Var>)>;

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Loss value and exact gradient from a single recorded sweep. Masked
/// coordinates get gradient 0. Throws NonFiniteLossError.
ValueAndGradient value_and_gradient(const VarLoss& loss, const FlatParams& params);

std::vector<double> gradient(const VarLoss& loss, const FlatParams& params);

/// Number of sweeps recorded by value_and_gradient in this process.
std::uint64_t evaluation_count() noexcept;

}  // namespace nsindy
