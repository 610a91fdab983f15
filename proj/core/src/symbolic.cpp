#include "nsindy/symbolic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <fmt/format.h>

namespace nsindy {

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  std::size_t index = 0;
  int exponent = 1;
  const BasisFunction* basis = nullptr;
  std::vector<Expr> children;
};

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::add;
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::mul;
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::pow(Expr base, int exponent) {
  if (exponent < 1) throw std::invalid_argument("Expr::pow needs an exponent >= 1");
  if (exponent == 1) return base;
  auto n = std::make_shared<Node>();
  n->kind = Kind::pow;
  n->exponent = exponent;
  n->children = {std::move(base)};
  return Expr(std::move(n));
}

Expr Expr::call(const std::string& function, Expr arg) {
  const auto j = catalog().find(function);
  if (!j) throw UnknownBasisError(function);
  auto n = std::make_shared<Node>();
  n->kind = Kind::call;
  n->basis = &catalog()[*j];
  n->children = {std::move(arg)};
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const { return node_->value; }
std::size_t Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
const std::string& Expr::function() const { return node_->basis->name; }
const std::vector<Expr>& Expr::children() const { return node_->children; }
const BasisFunction& Expr::basis() const { return *node_->basis; }

bool Expr::is_closed() const {
  if (kind() == Kind::variable) return false;
  for (const auto& c : children()) {
    if (!c.is_closed()) return false;
  }
  return true;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::constant: return a.value() == b.value();
    case Expr::Kind::variable: return a.index() == b.index();
    case Expr::Kind::pow:
      if (a.exponent() != b.exponent()) return false;
      break;
    case Expr::Kind::call:
      if (a.function() != b.function()) return false;
      break;
    default: break;
  }
  return a.children() == b.children();
}

double eval_expr(const Expr& expr, std::span<const double> x) {
  switch (expr.kind()) {
    case Expr::Kind::constant: return expr.value();
    case Expr::Kind::variable:
      if (expr.index() >= x.size()) throw ShapeError("eval_expr: variable index exceeds input arity");
      return x[expr.index()];
    case Expr::Kind::add: {
      double s = 0.0;
      for (const auto& c : expr.children()) s += eval_expr(c, x);
      return s;
    }
    case Expr::Kind::mul: {
      double p = 1.0;
      for (const auto& c : expr.children()) p *= eval_expr(c, x);
      return p;
    }
    case Expr::Kind::pow: {
      const double b = eval_expr(expr.children()[0], x);
      double p = b;
      for (int e = 1; e < expr.exponent(); ++e) p *= b;
      return p;
    }
    case Expr::Kind::call: return eval(expr.basis(), eval_expr(expr.children()[0], x));
  }
  return 0.0;
}

namespace {

// w * e without materializing unit weights.
Expr scaled(double w, const Expr& e) {
  if (w == 1.0) return e;
  return Expr::mul({Expr::constant(w), e});
}

std::vector<Expr> monomials(const PolySpec& poly, const std::vector<Expr>& inputs) {
  std::vector<Expr> out;
  out.reserve(poly.size());
  for (const auto& mono : poly.monomials) {
    std::vector<Expr> factors;
    for (std::size_t v = 0; v < poly.arity; ++v) {
      if (mono[v] > 0) factors.push_back(Expr::pow(inputs[v], mono[v]));
    }
    out.push_back(Expr::mul(std::move(factors)));
  }
  return out;
}

std::vector<Expr> linear(const LinearLayer& layer, const FlatParams& params, const std::vector<Expr>& inputs) {
  std::vector<Expr> out;
  out.reserve(layer.outputs);
  for (std::size_t j = 0; j < layer.outputs; ++j) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      const std::size_t w = i * layer.outputs + j;
      if (layer.trainable) {
        const std::size_t flat = layer.weight_offset + w;
        if (params.active(flat)) terms.push_back(scaled(params.values[flat], inputs[i]));
      } else if (layer.weight_mask[w]) {
        terms.push_back(scaled(layer.weights[w], inputs[i]));
      }
    }
    if (layer.has_bias) {
      if (layer.trainable) {
        const std::size_t flat = layer.bias_offset + j;
        if (params.active(flat)) terms.push_back(Expr::constant(params.values[flat]));
      } else if (layer.bias_mask[j]) {
        terms.push_back(Expr::constant(layer.bias[j]));
      }
    }
    out.push_back(Expr::add(std::move(terms)));
  }
  return out;
}

}  // namespace

Expr extract(const NetworkSpec& spec, const FlatParams& params) {
  if (params.size() != spec.parameter_count()) throw ShapeError("extract: parameter length mismatch");
  std::vector<Expr> vars;
  for (std::size_t v = 0; v < spec.input_arity(); ++v) vars.push_back(Expr::variable(v));

  const auto features = monomials(spec.poly_in, vars);
  const auto hidden = linear(spec.linear_1, params, features);
  std::vector<Expr> radial;
  radial.reserve(hidden.size());
  for (std::size_t j = 0; j < hidden.size(); ++j) {
    radial.push_back(Expr::call(spec.dictionary[spec.radial.node_functions[j]].name, hidden[j]));
  }
  if (spec.kind() == ModelKind::prp) {
    const auto mid = linear(spec.linear_mid, params, radial);
    const auto out_features = monomials(spec.poly_out, mid);
    return linear(spec.linear_2, params, out_features)[0];
  }
  return linear(spec.linear_2, params, radial)[0];
}

namespace {

// Constant factor of an addend: the leading constant of a product, the
// value of a constant, 1 otherwise.
double coefficient(const Expr& e) {
  if (e.kind() == Expr::Kind::constant) return e.value();
  if (e.kind() == Expr::Kind::mul && e.children().front().is_constant()) return e.children().front().value();
  return 1.0;
}

}  // namespace

Expr simplify(const Expr& expr, double drop_below) {
  switch (expr.kind()) {
    case Expr::Kind::constant:
    case Expr::Kind::variable: return expr;
    default: break;
  }
  if (expr.is_closed()) return Expr::constant(eval_expr(expr, {}));

  std::vector<Expr> kids;
  kids.reserve(expr.children().size());
  for (const auto& c : expr.children()) kids.push_back(simplify(c, drop_below));

  switch (expr.kind()) {
    case Expr::Kind::add: {
      std::vector<Expr> flat;
      for (const auto& k : kids) {
        if (k.kind() == Expr::Kind::add) {
          flat.insert(flat.end(), k.children().begin(), k.children().end());
        } else {
          flat.push_back(k);
        }
      }
      double constant_sum = 0.0;
      std::vector<Expr> terms;
      for (const auto& t : flat) {
        if (t.is_constant()) {
          constant_sum += t.value();
          continue;
        }
        const double c = coefficient(t);
        if (c == 0.0 || std::abs(c) < drop_below) continue;
        terms.push_back(t);
      }
      if (constant_sum != 0.0 && !(std::abs(constant_sum) < drop_below)) terms.push_back(Expr::constant(constant_sum));
      return Expr::add(std::move(terms));
    }
    case Expr::Kind::mul: {
      std::vector<Expr> flat;
      for (const auto& k : kids) {
        if (k.kind() == Expr::Kind::mul) {
          flat.insert(flat.end(), k.children().begin(), k.children().end());
        } else {
          flat.push_back(k);
        }
      }
      double constant_product = 1.0;
      std::vector<Expr> factors;
      for (const auto& f : flat) {
        if (f.is_constant()) {
          constant_product *= f.value();
        } else {
          factors.push_back(f);
        }
      }
      if (constant_product == 0.0) return Expr::constant(0.0);
      if (constant_product != 1.0) factors.insert(factors.begin(), Expr::constant(constant_product));
      return Expr::mul(std::move(factors));
    }
    case Expr::Kind::pow: {
      const Expr& base = kids[0];
      if (base.kind() == Expr::Kind::pow) return Expr::pow(base.children()[0], base.exponent() * expr.exponent());
      return Expr::pow(base, expr.exponent());
    }
    case Expr::Kind::call: {
      // Powers read better as powers.
      const auto& fn = expr.function();
      if (fn == "identity") return kids[0];
      if (fn == "square" || fn == "cube") {
        const int e = fn == "square" ? 2 : 3;
        if (kids[0].kind() == Expr::Kind::pow) return Expr::pow(kids[0].children()[0], kids[0].exponent() * e);
        return Expr::pow(kids[0], e);
      }
      return Expr::call(fn, kids[0]);
    }
    default: return expr;
  }
}

namespace {

std::string variable_name(std::size_t i, std::span<const std::string> names) {
  if (i < names.size()) return names[i];
  static const char* defaults[] = {"x", "y", "z"};
  if (i < 3) return defaults[i];
  return "x" + std::to_string(i + 1);
}

std::string number(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s == "-" + fmt::format("{:.{}f}", 0.0, decimals)) s.erase(0, 1);
  return s;
}

bool negative_leading(const Expr& e) {
  if (e.is_constant()) return e.value() < 0.0;
  return e.kind() == Expr::Kind::mul && e.children().front().is_constant() && e.children().front().value() < 0.0;
}

Expr negated(const Expr& e) {
  if (e.is_constant()) return Expr::constant(-e.value());
  std::vector<Expr> factors = e.children();
  factors.front() = Expr::constant(-factors.front().value());
  if (factors.front().value() == 1.0) factors.erase(factors.begin());
  return Expr::mul(std::move(factors));
}

std::string render_impl(const Expr& e, int decimals, std::span<const std::string> names);

std::string render_factor(const Expr& e, int decimals, std::span<const std::string> names, bool first) {
  const std::string s = render_impl(e, decimals, names);
  const bool wrap = e.kind() == Expr::Kind::add || (!first && e.is_constant() && e.value() < 0.0);
  return wrap ? "(" + s + ")" : s;
}

std::string render_impl(const Expr& e, int decimals, std::span<const std::string> names) {
  switch (e.kind()) {
    case Expr::Kind::constant: return number(e.value(), decimals);
    case Expr::Kind::variable: return variable_name(e.index(), names);
    case Expr::Kind::add: {
      std::string out;
      bool first = true;
      for (const auto& t : e.children()) {
        if (first) {
          out = render_impl(t, decimals, names);
          first = false;
        } else if (negative_leading(t)) {
          out += " - " + render_impl(negated(t), decimals, names);
        } else {
          out += " + " + render_impl(t, decimals, names);
        }
      }
      return out;
    }
    case Expr::Kind::mul: {
      std::string out;
      bool first = true;
      for (const auto& f : e.children()) {
        if (!first) out += "·";
        out += render_factor(f, decimals, names, first);
        first = false;
      }
      return out;
    }
    case Expr::Kind::pow: {
      const Expr& base = e.children()[0];
      std::string b = render_impl(base, decimals, names);
      const bool atomic = base.kind() == Expr::Kind::variable || base.kind() == Expr::Kind::call ||
                          (base.is_constant() && base.value() >= 0.0);
      if (!atomic) b = "(" + b + ")";
      return b + "^" + std::to_string(e.exponent());
    }
    case Expr::Kind::call: return e.function() + "(" + render_impl(e.children()[0], decimals, names) + ")";
  }
  return {};
}

}  // namespace

std::string render(const Expr& expr, int decimals, std::span<const std::string> variable_names) {
  if (decimals < 1) throw std::invalid_argument("render: decimals must be >= 1");
  return render_impl(expr, decimals, variable_names);
}

std::size_t count_constants(const Expr& expr) {
  if (expr.is_constant()) return 1;
  std::size_t n = 0;
  for (const auto& c : expr.children()) n += count_constants(c);
  return n;
}

std::size_t expr_size(const Expr& expr) {
  std::size_t n = 1;
  if (expr.kind() == Expr::Kind::constant || expr.kind() == Expr::Kind::variable) return n;
  for (const auto& c : expr.children()) n += expr_size(c);
  return n;
}

}  // namespace nsindy
