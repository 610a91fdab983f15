#include "nsindy/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace nsindy {

namespace {

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double clamp_exp_input(double x) { return std::clamp(x, -kExpClamp, kExpClamp); }

double identity(double x) { return x; }
double d_identity(double) { return 1.0; }

double square(double x) { return x * x; }
double d_square(double x) { return 2.0 * x; }

double cube(double x) { return x * x * x; }
double d_cube(double x) { return 3.0 * x * x; }

double arctan(double x) { return std::atan(x); }
double d_arctan(double x) { return 1.0 / (1.0 + x * x); }

double sin_(double x) { return std::sin(x); }
double d_sin(double x) { return std::cos(x); }

double cos_(double x) { return std::cos(x); }
double d_cos(double x) { return -std::sin(x); }

double tanh_(double x) { return std::tanh(x); }
double d_tanh(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}

double exp_(double x) { return std::exp(clamp_exp_input(x)); }
double d_exp(double x) { return std::abs(x) > kExpClamp ? 0.0 : std::exp(x); }

double log_safe(double x) { return std::log(std::abs(x) + kAbsShift); }
double d_log_safe(double x) { return sign0(x) / (std::abs(x) + kAbsShift); }

double sqrt_safe(double x) { return std::sqrt(std::abs(x) + kAbsShift); }
double d_sqrt_safe(double x) { return sign0(x) / (2.0 * std::sqrt(std::abs(x) + kAbsShift)); }

double inv_quad(double x) { return 1.0 / (1.0 + x * x); }
double d_inv_quad(double x) {
  const double q = 1.0 + x * x;
  return -2.0 * x / (q * q);
}

double gauss(double x) { return std::exp(-x * x); }
double d_gauss(double x) { return -2.0 * x * std::exp(-x * x); }

double exp_inv_quad(double x) { return std::exp(inv_quad(x)); }
double d_exp_inv_quad(double x) { return exp_inv_quad(x) * d_inv_quad(x); }

// log(1 + e^x) without overflow for large |x|.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double d_softplus(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sqrt_abs(double x) { return std::sqrt(std::abs(x)); }
double d_sqrt_abs(double x) { return x == 0.0 ? 0.0 : sign0(x) / (2.0 * std::sqrt(std::abs(x))); }

}  // namespace

UnknownBasisError::UnknownBasisError(const std::string& name)
    : std::invalid_argument("unknown basis function '" + name + "'"), name_(name) {}

Dictionary::Dictionary(std::vector<BasisFunction> entries) : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.name).second) {
      throw std::invalid_argument("duplicate basis function '" + e.name + "' in dictionary");
    }
  }
}

std::optional<std::size_t> Dictionary::find(std::string_view name) const {
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (entries_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::string> Dictionary::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

Dictionary builtin_catalog() {
  return Dictionary({
      {"identity", identity, d_identity, Guard::none, {}},
      {"square", square, d_square, Guard::none, {}},
      {"cube", cube, d_cube, Guard::none, {}},
      {"arctan", arctan, d_arctan, Guard::none, {}},
      {"sin", sin_, d_sin, Guard::none, {}},
      {"cos", cos_, d_cos, Guard::none, {}},
      {"tanh", tanh_, d_tanh, Guard::none, {}},
      {"exp", exp_, d_exp, Guard::input_clamp, {-kExpClamp, kExpClamp}},
      {"log_safe", log_safe, d_log_safe, Guard::abs_shift, {0.0}},
      {"sqrt_safe", sqrt_safe, d_sqrt_safe, Guard::abs_shift, {0.0}},
      {"inv_quad", inv_quad, d_inv_quad, Guard::none, {}},
      {"gauss", gauss, d_gauss, Guard::none, {}},
      {"exp_inv_quad", exp_inv_quad, d_exp_inv_quad, Guard::none, {}},
      {"softplus", softplus, d_softplus, Guard::none, {}},
      {"sqrt_abs", sqrt_abs, d_sqrt_abs, Guard::abs_shift, {0.0}},
  });
}

const Dictionary& catalog() {
  static const Dictionary instance = builtin_catalog();
  return instance;
}

Dictionary subset(const Dictionary& dictionary, std::span<const std::string> names) {
  std::vector<BasisFunction> picked;
  picked.reserve(names.size());
  for (const auto& name : names) {
    const auto j = dictionary.find(name);
    if (!j) throw UnknownBasisError(name);
    picked.push_back(dictionary[*j]);
  }
  return Dictionary(std::move(picked));
}

Dictionary make_dictionary(std::span<const std::string> names) { return subset(catalog(), names); }

Dictionary make_dictionary(std::initializer_list<std::string> names) {
  const std::vector<std::string> v(names);
  return subset(catalog(), v);
}

}  // namespace nsindy
