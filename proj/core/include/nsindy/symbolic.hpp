#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nsindy/network.hpp"
#include "nsindy/params.hpp"

namespace nsindy {

/// Immutable expression tree over constants, input variables, sums,
/// products, integer powers and dictionary calls. Copies share structure.
class Expr {
 public:
  enum class Kind { constant, variable, add, mul, pow, call };

  static Expr constant(double value);
  static Expr variable(std::size_t index);
  /// Sum of the terms; a single term is returned as-is, no terms give 0.
  static Expr add(std::vector<Expr> terms);
  /// Product of the factors; a single factor is returned as-is, none give 1.
  static Expr mul(std::vector<Expr> factors);
  /// base^exponent with exponent >= 1; exponent 1 returns base.
  static Expr pow(Expr base, int exponent);
  /// Catalog function applied to arg. Throws UnknownBasisError.
  static Expr call(const std::string& function, Expr arg);

  Kind kind() const noexcept;
  double value() const;                  // constant
  std::size_t index() const;             // variable
  int exponent() const;                  // pow
  const std::string& function() const;   // call
  const std::vector<Expr>& children() const;
  const BasisFunction& basis() const;    // call

  bool is_constant() const noexcept { return kind() == Kind::constant; }
  /// True if no variable occurs in the tree.
  bool is_closed() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Symbolic unrolling of the forward pass at full precision. Masked
/// weights are omitted and unit weights are not materialized.
Expr extract(const NetworkSpec& spec, const FlatParams& params);

/// Folds closed subtrees, flattens nested sums/products, merges constants
/// (leading in products, trailing in sums) and removes addends whose
/// constant factor is below drop_below in magnitude. Zero addends are
/// always removed.
Expr simplify(const Expr& expr, double drop_below);

/// Infix rendering with `decimals` digits after the point, `^` for powers
/// and `·` for products. Variables default to x, y, z, x4, ...
std::string render(const Expr& expr, int decimals, std::span<const std::string> variable_names = {});

/// Evaluates with the same guarded basis functions the network uses.
double eval_expr(const Expr& expr, std::span<const double> x);

/// Number of constant leaves (the surviving trainable constants after simplify).
std::size_t count_constants(const Expr& expr);

/// Number of nodes in the tree.
std::size_t expr_size(const Expr& expr);

}  // namespace nsindy
