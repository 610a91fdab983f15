#include "nsindy/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace nsindy {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::classic: return "classic";
    case ModelKind::pr: return "pr";
    case ModelKind::prp: return "prp";
  }
  return "?";
}

std::string to_string(MonomialMode mode) {
  return mode == MonomialMode::full_tensor ? "full-tensor" : "total-degree";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "classic") return ModelKind::classic;
  if (s == "pr") return ModelKind::pr;
  if (s == "prp") return ModelKind::prp;
  throw std::invalid_argument("unknown model kind '" + s + "' (expected classic, pr or prp)");
}

MonomialMode parse_monomial_mode(const std::string& s) {
  if (s == "full-tensor") return MonomialMode::full_tensor;
  if (s == "total-degree") return MonomialMode::total_degree;
  throw std::invalid_argument("unknown monomial mode '" + s + "'");
}

PolySpec PolySpec::make(std::size_t arity, int degree, MonomialMode mode) {
  if (arity == 0) throw ShapeError("polynomial layer needs at least one input");
  if (degree < 1) throw ShapeError("polynomial degree must be >= 1");
  PolySpec spec;
  spec.arity = arity;
  spec.degree = degree;
  spec.mode = mode;

  const int max_total = mode == MonomialMode::full_tensor ? degree * static_cast<int>(arity) : degree;
  std::vector<int> current(arity, 0);
  // Exponent tuples with a fixed total, first variable's exponent descending.
  std::function<void(std::size_t, int)> emit = [&](std::size_t v, int remaining) {
    if (v + 1 == arity) {
      if (remaining <= degree) {
        current[v] = remaining;
        spec.monomials.push_back(current);
      }
      return;
    }
    for (int e = std::min(remaining, degree); e >= 0; --e) {
      current[v] = e;
      emit(v + 1, remaining - e);
    }
  };
  for (int total = 1; total <= max_total; ++total) emit(0, total);
  return spec;
}

int PolySpec::max_exponent() const noexcept {
  int m = 0;
  for (const auto& mono : monomials) {
    for (int e : mono) m = std::max(m, e);
  }
  return m;
}

std::vector<double> poly_features(const PolySpec& spec, std::span<const double> input) {
  if (input.size() != spec.arity) throw ShapeError("poly_features: input arity mismatch");
  std::vector<double> powers, out;
  detail::poly_apply<double>(spec, input, powers, out);
  return out;
}

LinearLayer LinearLayer::zeros(std::size_t inputs, std::size_t outputs, bool has_bias) {
  LinearLayer layer;
  layer.inputs = inputs;
  layer.outputs = outputs;
  layer.has_bias = has_bias;
  layer.weights.assign(inputs * outputs, 0.0);
  layer.weight_mask.assign(inputs * outputs, 1);
  if (has_bias) {
    layer.bias.assign(outputs, 0.0);
    layer.bias_mask.assign(outputs, 1);
  }
  return layer;
}

std::size_t LinearLayer::parameter_count() const noexcept {
  if (!trainable) return 0;
  return inputs * outputs + (has_bias ? outputs : 0);
}

std::vector<double> linear_forward(const LinearLayer& layer, std::span<const double> v) {
  if (v.size() != layer.inputs) throw ShapeError("linear_forward: input length mismatch");
  // Evaluate against the layer's own storage, treating it as frozen.
  LinearLayer frozen = layer;
  frozen.trainable = false;
  std::vector<double> out;
  detail::linear_apply<double>(frozen, {}, {}, v, out);
  return out;
}

std::vector<double> radial_forward(const RadialAssignment& assign, const Dictionary& dictionary,
                                   std::span<const double> v) {
  if (v.size() != assign.node_functions.size()) throw ShapeError("radial_forward: width mismatch");
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = eval(dictionary[assign.node_functions[j]], v[j]);
  return out;
}

std::vector<std::size_t> cycle_nodes(std::size_t width, std::size_t dictionary_size) {
  std::vector<std::size_t> nodes(width);
  for (std::size_t j = 0; j < width; ++j) nodes[j] = j % dictionary_size;
  return nodes;
}

std::size_t NetworkSpec::parameter_count() const noexcept {
  std::size_t n = linear_1.parameter_count() + linear_2.parameter_count();
  if (kind() == ModelKind::prp) n += linear_mid.parameter_count();
  return n;
}

ParamLayout NetworkSpec::layout() const {
  ParamLayout layout;
  auto add = [&](const std::string& name, const LinearLayer& layer) {
    if (!layer.trainable) return;
    layout.push_back({name + ".weight", layer.weight_offset, layer.inputs * layer.outputs});
    if (layer.has_bias) layout.push_back({name + ".bias", layer.bias_offset, layer.outputs});
  };
  add("linear_1", linear_1);
  if (kind() == ModelKind::prp) add("linear_mid", linear_mid);
  add("linear_2", linear_2);
  return layout;
}

namespace {

void assign_offsets(NetworkSpec& spec) {
  std::size_t offset = 0;
  auto place = [&](LinearLayer& layer) {
    if (!layer.trainable) return;
    layer.weight_offset = offset;
    offset += layer.inputs * layer.outputs;
    if (layer.has_bias) {
      layer.bias_offset = offset;
      offset += layer.outputs;
    }
  };
  place(spec.linear_1);
  if (spec.kind() == ModelKind::prp) place(spec.linear_mid);
  place(spec.linear_2);
}

}  // namespace

NetworkSpec build_network(const NetworkArch& arch) {
  if (arch.arity == 0) throw ShapeError("network needs at least one input");
  if (arch.dictionary.empty()) throw ShapeError("network needs a non-empty dictionary");
  if (arch.nodes.empty()) throw ShapeError("radial layer needs at least one node");

  NetworkSpec spec;
  spec.arch = arch;
  spec.dictionary = make_dictionary(arch.dictionary);
  for (auto j : arch.nodes) {
    if (j >= spec.dictionary.size()) throw ShapeError("radial node refers to a missing dictionary entry");
  }
  spec.radial.node_functions = arch.nodes;
  const std::size_t width = arch.nodes.size();

  switch (arch.kind) {
    case ModelKind::classic: {
      spec.poly_in = PolySpec::make(arch.arity, 1, MonomialMode::total_degree);
      if (width % arch.arity != 0) throw ShapeError("classic radial width must be a multiple of the arity");
      spec.linear_1 = LinearLayer::zeros(arch.arity, width, false);
      spec.linear_1.trainable = false;
      // Node n reads variable n mod arity.
      for (std::size_t n = 0; n < width; ++n) spec.linear_1.weight(n % arch.arity, n) = 1.0;
      for (std::size_t w = 0; w < spec.linear_1.weights.size(); ++w) {
        spec.linear_1.weight_mask[w] = spec.linear_1.weights[w] != 0.0;
      }
      spec.linear_2 = LinearLayer::zeros(width, 1, false);
      break;
    }
    case ModelKind::pr: {
      spec.poly_in = PolySpec::make(arch.arity, arch.degree, arch.mode);
      spec.linear_1 = LinearLayer::zeros(spec.poly_in.size(), width);
      spec.linear_2 = LinearLayer::zeros(width, 1);
      break;
    }
    case ModelKind::prp: {
      if (arch.k == 0) throw ShapeError("PRP intermediate width k must be positive");
      spec.poly_in = PolySpec::make(arch.arity, arch.degree, arch.mode);
      spec.linear_1 = LinearLayer::zeros(spec.poly_in.size(), width);
      spec.linear_mid = LinearLayer::zeros(width, arch.k);
      spec.poly_out = PolySpec::make(arch.k, arch.out_degree, arch.out_mode);
      spec.linear_2 = LinearLayer::zeros(spec.poly_out.size(), 1);
      break;
    }
  }
  assign_offsets(spec);
  return spec;
}

NetworkSpec make_classic(const std::vector<std::string>& dictionary, std::size_t arity) {
  NetworkArch arch;
  arch.kind = ModelKind::classic;
  arch.arity = arity;
  arch.degree = 1;
  arch.dictionary = dictionary;
  for (std::size_t j = 0; j < dictionary.size(); ++j) {
    for (std::size_t v = 0; v < arity; ++v) arch.nodes.push_back(j);
  }
  return build_network(arch);
}

NetworkSpec make_pr(const std::vector<std::string>& dictionary, std::size_t arity, int degree,
                    std::size_t width, MonomialMode mode) {
  NetworkArch arch;
  arch.kind = ModelKind::pr;
  arch.arity = arity;
  arch.degree = degree;
  arch.mode = mode;
  arch.dictionary = dictionary;
  arch.nodes = cycle_nodes(width == 0 ? dictionary.size() : width, dictionary.size());
  return build_network(arch);
}

NetworkSpec make_prp(const std::vector<std::string>& dictionary, std::size_t arity, int degree,
                     std::size_t width, std::size_t k, int out_degree, MonomialMode mode) {
  NetworkArch arch;
  arch.kind = ModelKind::prp;
  arch.arity = arity;
  arch.degree = degree;
  arch.mode = mode;
  arch.dictionary = dictionary;
  arch.nodes = cycle_nodes(width == 0 ? dictionary.size() : width, dictionary.size());
  arch.k = k;
  arch.out_degree = out_degree;
  arch.out_mode = mode;
  return build_network(arch);
}

FlatParams flatten(const NetworkSpec& spec) {
  FlatParams p;
  p.layout = spec.layout();
  const std::size_t n = spec.parameter_count();
  p.values.assign(n, 0.0);
  p.mask.assign(n, 1);
  auto copy = [&](const LinearLayer& layer) {
    if (!layer.trainable) return;
    std::copy(layer.weights.begin(), layer.weights.end(), p.values.begin() + static_cast<std::ptrdiff_t>(layer.weight_offset));
    std::copy(layer.weight_mask.begin(), layer.weight_mask.end(), p.mask.begin() + static_cast<std::ptrdiff_t>(layer.weight_offset));
    if (layer.has_bias) {
      std::copy(layer.bias.begin(), layer.bias.end(), p.values.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset));
      std::copy(layer.bias_mask.begin(), layer.bias_mask.end(), p.mask.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset));
    }
  };
  copy(spec.linear_1);
  if (spec.kind() == ModelKind::prp) copy(spec.linear_mid);
  copy(spec.linear_2);
  return p;
}

void unflatten(NetworkSpec& spec, const FlatParams& params) {
  const std::size_t n = spec.parameter_count();
  if (params.values.size() != n || params.mask.size() != n) {
    throw ShapeError("unflatten: expected " + std::to_string(n) + " parameters, got " +
                     std::to_string(params.values.size()));
  }
  auto copy = [&](LinearLayer& layer) {
    if (!layer.trainable) return;
    for (std::size_t w = 0; w < layer.weights.size(); ++w) {
      layer.weights[w] = params.values[layer.weight_offset + w];
      layer.weight_mask[w] = params.mask[layer.weight_offset + w];
    }
    if (layer.has_bias) {
      for (std::size_t j = 0; j < layer.outputs; ++j) {
        layer.bias[j] = params.values[layer.bias_offset + j];
        layer.bias_mask[j] = params.mask[layer.bias_offset + j];
      }
    }
  };
  copy(spec.linear_1);
  if (spec.kind() == ModelKind::prp) copy(spec.linear_mid);
  copy(spec.linear_2);
}

ParameterCount count_parameters(const NetworkSpec& spec, const FlatParams& params) {
  if (params.size() != spec.parameter_count()) throw ShapeError("count_parameters: parameter length mismatch");
  return {params.size(), params.active_count()};
}

double forward(const NetworkSpec& spec, const FlatParams& params, std::span<const double> x) {
  if (params.size() != spec.parameter_count()) throw ShapeError("forward: parameter length mismatch");
  thread_local Workspace<double> ws;
  return forward_t<double>(spec, params.values, params.mask, x, ws);
}

double forward_checked(const NetworkSpec& spec, const FlatParams& params, std::span<const double> x) {
  const double y = forward(spec, params, x);
  if (!std::isfinite(y)) throw NumericOverflowError("network output is not finite");
  return y;
}

}  // namespace nsindy
