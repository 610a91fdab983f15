#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nsindy {

/// Numerical safeguard attached to a basis function.
enum class Guard {
  none,
  abs_shift,    // evaluated on |x| (+ 1e-5 for the "_safe" variants)
  input_clamp,  // input clamped before evaluation
};

/// A named scalar basis function with its exact first derivative.
///
/// Every entry is total on the finite reals: guarded variants never return
/// inf/nan for finite input. `kinks` lists the inputs where the guard makes
/// the function non-smooth; derivatives there follow sign(0) = 0.
struct BasisFunction {
  std::string name;
  double (*value)(double) = nullptr;
  double (*derivative)(double) = nullptr;
  Guard guard = Guard::none;
  std::vector<double> kinks;
};

class UnknownBasisError : public std::invalid_argument {
 public:
  explicit UnknownBasisError(const std::string& name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Ordered set of basis functions. Index j refers to the j-th entry and is
/// stable for the lifetime of the dictionary.
class Dictionary {
 public:
  Dictionary() = default;
  explicit Dictionary(std::vector<BasisFunction> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const BasisFunction& operator[](std::size_t j) const { return entries_[j]; }
  const std::vector<BasisFunction>& entries() const noexcept { return entries_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<BasisFunction> entries_;
};

/// Every basis function used by the bundled cases:
/// identity, square, cube, arctan, sin, cos, tanh, exp, log_safe, sqrt_safe,
/// inv_quad, gauss, exp_inv_quad, softplus, sqrt_abs.
Dictionary builtin_catalog();

/// Shared immutable instance of builtin_catalog().
const Dictionary& catalog();

/// Sub-dictionary in the given name order. Throws UnknownBasisError.
Dictionary subset(const Dictionary& dictionary, std::span<const std::string> names);

/// Convenience: subset of the builtin catalog.
Dictionary make_dictionary(std::span<const std::string> names);
Dictionary make_dictionary(std::initializer_list<std::string> names);

inline double eval(const BasisFunction& basis, double x) { return basis.value(x); }
inline double eval_derivative(const BasisFunction& basis, double x) { return basis.derivative(x); }

/// Input clamp applied by the exp entries.
inline constexpr double kExpClamp = 50.0;
/// Shift used by log_safe and sqrt_safe.
inline constexpr double kAbsShift = 1e-5;

}  // namespace nsindy
