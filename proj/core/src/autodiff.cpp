#include "nsindy/autodiff.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace nsindy {

namespace {
std::atomic<std::uint64_t> g_sweeps{0};
}

thread_local Tape* Tape::current_ = nullptr;

Tape::Scope::Scope(Tape& tape) : previous_(current_) { current_ = &tape; }
Tape::Scope::~Scope() { current_ = previous_; }

std::vector<double> Tape::adjoints(std::int32_t output) const {
  std::vector<double> adj;
  adjoints(output, adj);
  return adj;
}

void Tape::adjoints(std::int32_t output, std::vector<double>& adj) const {
  adj.assign(nodes_.size(), 0.0);
  if (output < 0) return;
  adj[static_cast<std::size_t>(output)] = 1.0;
  for (std::int32_t i = output; i >= 0; --i) {
    const double a = adj[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.lhs >= 0) adj[static_cast<std::size_t>(n.lhs)] += a * n.d_lhs;
    if (n.rhs >= 0) adj[static_cast<std::size_t>(n.rhs)] += a * n.d_rhs;
  }
}

NonFiniteLossError::NonFiniteLossError(double loss, std::vector<double> parameters)
    : std::runtime_error("loss is not finite (" + std::to_string(loss) + ")"),
      loss_(loss),
      parameters_(std::move(parameters)) {}

std::size_t FlatParams::active_count() const {
  std::size_t n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

void FlatParams::apply_mask() {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) values[i] = 0.0;
  }
}

ValueAndGradient value_and_gradient(const VarLoss& loss, const FlatParams& params) {
  // Large losses record millions of nodes; keep the buffers between calls
  // unless this call is nested inside another recording on the same thread.
  thread_local Tape cached;
  thread_local std::vector<double> cached_adj;
  Tape fresh;
  std::vector<double> fresh_adj;
  const bool nested = Tape::active() == &cached;
  Tape& tape = nested ? fresh : cached;
  std::vector<double>& adj = nested ? fresh_adj : cached_adj;
  tape.clear();
  Tape::Scope scope(tape);

  const std::size_t n = params.values.size();
  std::vector<Var> inputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    inputs[i] = params.active(i) ? Var(params.values[i], tape.leaf()) : Var(0.0);
  }

  const Var out = loss(inputs);
  g_sweeps.fetch_add(1, std::memory_order_relaxed);
  if (!std::isfinite(out.value())) throw NonFiniteLossError(out.value(), params.values);

  ValueAndGradient result;
  result.value = out.value();
  result.gradient.assign(n, 0.0);
  if (out.is_constant()) return result;

  tape.adjoints(out.index(), adj);
  for (std::size_t i = 0; i < n; ++i) {
    if (!inputs[i].is_constant()) result.gradient[i] = adj[static_cast<std::size_t>(inputs[i].index())];
  }
  return result;
}

std::vector<double> gradient(const VarLoss& loss, const FlatParams& params) {
  return value_and_gradient(loss, params).gradient;
}

std::uint64_t evaluation_count() noexcept { return g_sweeps.load(std::memory_order_relaxed); }

}  // namespace nsindy
