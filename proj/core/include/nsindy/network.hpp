#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsindy/autodiff.hpp"
#include "nsindy/dictionary.hpp"
#include "nsindy/params.hpp"

namespace nsindy {

enum class ModelKind { classic, pr, prp };
enum class MonomialMode { full_tensor, total_degree };

std::string to_string(ModelKind kind);
std::string to_string(MonomialMode mode);
ModelKind parse_model_kind(const std::string& s);
MonomialMode parse_monomial_mode(const std::string& s);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monomial feature map without the constant term.
///
/// Monomials are in graded lexicographic order: by total degree, then by
/// decreasing exponent of the first variable, then the second, and so on.
/// For (x, y) at degree 2 in total-degree mode this gives x, y, x^2, xy, y^2.
struct PolySpec {
  std::size_t arity = 1;
  int degree = 1;
  MonomialMode mode = MonomialMode::total_degree;
  std::vector<std::vector<int>> monomials;

  static PolySpec make(std::size_t arity, int degree, MonomialMode mode = MonomialMode::total_degree);
  std::size_t size() const noexcept { return monomials.size(); }
  int max_exponent() const noexcept;
};

std::vector<double> poly_features(const PolySpec& spec, std::span<const double> input);

/// Affine layer. weights are stored input-major: weights[i * outputs + j].
/// A frozen layer (trainable == false) contributes no flat parameters.
struct LinearLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  bool has_bias = true;
  bool trainable = true;
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<std::uint8_t> weight_mask;
  std::vector<std::uint8_t> bias_mask;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  static LinearLayer zeros(std::size_t inputs, std::size_t outputs, bool has_bias = true);

  double& weight(std::size_t i, std::size_t j) { return weights[i * outputs + j]; }
  double weight(std::size_t i, std::size_t j) const { return weights[i * outputs + j]; }
  std::size_t parameter_count() const noexcept;
};

/// (weights o mask)^T v + bias o mask
std::vector<double> linear_forward(const LinearLayer& layer, std::span<const double> v);

/// One dictionary index per radial node.
struct RadialAssignment {
  std::vector<std::size_t> node_functions;
};

std::vector<double> radial_forward(const RadialAssignment& assign, const Dictionary& dictionary,
                                   std::span<const double> v);

/// Architecture descriptor; enough to rebuild a NetworkSpec.
struct NetworkArch {
  ModelKind kind = ModelKind::pr;
  std::size_t arity = 1;
  int degree = 2;
  MonomialMode mode = MonomialMode::total_degree;
  std::vector<std::string> dictionary;
  std::vector<std::size_t> nodes;  // dictionary index per radial node
  std::size_t k = 2;               // PRP intermediate width
  int out_degree = 2;              // PRP second polynomial layer
  MonomialMode out_mode = MonomialMode::total_degree;

  friend bool operator==(const NetworkArch&, const NetworkArch&) = default;
};

/// Nodes cycling through the dictionary: node j uses entry j mod l.
std::vector<std::size_t> cycle_nodes(std::size_t width, std::size_t dictionary_size);

/// PR:      poly_in -> linear_1 -> radial -> linear_2
/// PRP:     poly_in -> linear_1 -> radial -> linear_mid -> poly_out -> linear_2
/// classic: raw inputs -> frozen selection -> radial -> linear_2 (no bias)
struct NetworkSpec {
  NetworkArch arch;
  Dictionary dictionary;
  PolySpec poly_in;
  LinearLayer linear_1;
  RadialAssignment radial;
  LinearLayer linear_mid;
  PolySpec poly_out;
  LinearLayer linear_2;

  ModelKind kind() const noexcept { return arch.kind; }
  std::size_t input_arity() const noexcept { return arch.arity; }
  std::size_t width() const noexcept { return radial.node_functions.size(); }
  std::size_t parameter_count() const noexcept;
  ParamLayout layout() const;
};

/// Builds a network with zero weights and every parameter active.
NetworkSpec build_network(const NetworkArch& arch);

NetworkSpec make_classic(const std::vector<std::string>& dictionary, std::size_t arity = 1);
NetworkSpec make_pr(const std::vector<std::string>& dictionary, std::size_t arity, int degree,
                    std::size_t width = 0, MonomialMode mode = MonomialMode::total_degree);
NetworkSpec make_prp(const std::vector<std::string>& dictionary, std::size_t arity, int degree,
                     std::size_t width = 0, std::size_t k = 2, int out_degree = 2,
                     MonomialMode mode = MonomialMode::total_degree);

FlatParams flatten(const NetworkSpec& spec);
void unflatten(NetworkSpec& spec, const FlatParams& params);

struct ParameterCount {
  std::size_t total = 0;
  std::size_t active = 0;
};
ParameterCount count_parameters(const NetworkSpec& spec, const FlatParams& params);

/// Scratch buffers reused across forward evaluations.
template <class T>
struct Workspace {
  std::vector<T> powers;
  std::vector<T> features;
  std::vector<T> hidden;
  std::vector<T> radial;
  std::vector<T> mid;
  std::vector<T> mid_powers;
  std::vector<T> out_features;
};

namespace detail {

template <class T>
void poly_apply(const PolySpec& spec, std::span<const T> in, std::vector<T>& powers, std::vector<T>& out) {
  const auto stride = static_cast<std::size_t>(spec.max_exponent()) + 1;
  powers.resize(spec.arity * stride);
  for (std::size_t v = 0; v < spec.arity; ++v) {
    T* p = powers.data() + v * stride;
    p[0] = T(1.0);
    if (stride > 1) p[1] = in[v];
    for (std::size_t e = 2; e < stride; ++e) p[e] = p[e - 1] * in[v];
  }
  out.resize(spec.monomials.size());
  for (std::size_t m = 0; m < spec.monomials.size(); ++m) {
    const auto& mono = spec.monomials[m];
    bool first = true;
    T acc{};
    for (std::size_t v = 0; v < spec.arity; ++v) {
      const int e = mono[v];
      if (e == 0) continue;
      const T& f = powers[v * stride + static_cast<std::size_t>(e)];
      acc = first ? f : acc * f;
      first = false;
    }
    out[m] = acc;
  }
}

template <class T>
void linear_apply(const LinearLayer& layer, std::span<const T> theta, std::span<const std::uint8_t> mask,
                  std::span<const T> in, std::vector<T>& out) {
  out.resize(layer.outputs);
  for (std::size_t j = 0; j < layer.outputs; ++j) {
    T acc(0.0);
    bool started = false;
    auto add = [&](const T& term) {
      acc = started ? acc + term : term;
      started = true;
    };
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      const std::size_t w = i * layer.outputs + j;
      if (layer.trainable) {
        const std::size_t flat = layer.weight_offset + w;
        if (mask[flat]) add(theta[flat] * in[i]);
      } else if (layer.weight_mask[w]) {
        add(T(layer.weights[w]) * in[i]);
      }
    }
    if (layer.has_bias) {
      if (layer.trainable) {
        const std::size_t flat = layer.bias_offset + j;
        if (mask[flat]) add(theta[flat]);
      } else if (layer.bias_mask[j]) {
        add(T(layer.bias[j]));
      }
    }
    out[j] = acc;
  }
}

}  // namespace detail

/// Network output for parameters theta (masked coordinates skipped).
/// Instantiated for double and Var; the Var path records onto the active tape.
template <class T>
T forward_t(const NetworkSpec& spec, std::span<const T> theta, std::span<const std::uint8_t> mask,
            std::span<const T> x, Workspace<T>& ws) {
  if (x.size() != spec.input_arity()) throw ShapeError("forward: input arity mismatch");
  detail::poly_apply<T>(spec.poly_in, x, ws.powers, ws.features);
  detail::linear_apply<T>(spec.linear_1, theta, mask, ws.features, ws.hidden);
  ws.radial.resize(ws.hidden.size());
  for (std::size_t j = 0; j < ws.hidden.size(); ++j) {
    ws.radial[j] = basis_apply(spec.dictionary[spec.radial.node_functions[j]], ws.hidden[j]);
  }
  if (spec.kind() == ModelKind::prp) {
    detail::linear_apply<T>(spec.linear_mid, theta, mask, ws.radial, ws.mid);
    detail::poly_apply<T>(spec.poly_out, ws.mid, ws.mid_powers, ws.out_features);
    detail::linear_apply<T>(spec.linear_2, theta, mask, ws.out_features, ws.hidden);
  } else {
    detail::linear_apply<T>(spec.linear_2, theta, mask, ws.radial, ws.hidden);
  }
  return ws.hidden[0];
}

/// Network output at x; may be inf/nan if the parameters overflow.
double forward(const NetworkSpec& spec, const FlatParams& params, std::span<const double> x);
/// As forward, but throws NumericOverflowError on a non-finite result.
double forward_checked(const NetworkSpec& spec, const FlatParams& params, std::span<const double> x);

}  // namespace nsindy
