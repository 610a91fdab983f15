#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nsindy/cases.hpp"
#include "nsindy/odedisc.hpp"

using namespace nsindy;

namespace {

FlatParams random_params(const NetworkSpec& spec, std::uint64_t seed) {
  auto p = flatten(spec);
  Rng rng(seed);
  std::normal_distribution<double> d(0.0, 0.5);
  for (auto& v : p.values) v = d(rng);
  return p;
}

NetworkSpec case_network(const std::string& id) { return build_network(preset(id).arch); }

void BM_Forward(benchmark::State& state, const char* id) {
  const auto spec = case_network(id);
  const auto p = random_params(spec, 1);
  std::vector<double> x(spec.input_arity(), 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(forward(spec, p, x));
}

void BM_RegressionGradient(benchmark::State& state) {
  const auto pre = preset("fn-cos-x2-pr");
  const auto spec = build_network(pre.arch);
  const auto p = random_params(spec, 2);
  Rng rng(0);
  const auto data = make_samples(pre.data, rng);
  std::vector<std::size_t> rows(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i % data.size();
  for (auto _ : state) {
    auto g = value_and_gradient(
        [&](std::span<const Var> t) { return regression_loss_var(spec, t, p.mask, data, rows, 1e-4); }, p);
    benchmark::DoNotOptimize(g.value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrajectoryGradient(benchmark::State& state) {
  const auto pre = preset("ode-sinx2");
  const auto spec = build_network(pre.arch);
  auto p = random_params(spec, 3);
  for (auto& v : p.values) v *= 0.2;
  Rng rng(0);
  const auto data = make_trajectories(pre.data, rng);
  const auto windows = sample_windows(data, 30, 5, rng);
  for (auto _ : state) {
    auto g = value_and_gradient(
        [&](std::span<const Var> t) { return trajectory_loss_var(spec, t, p.mask, data, windows, 1e-4).total; }, p);
    benchmark::DoNotOptimize(g.value);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Forward, cos_x2_pr, "fn-cos-x2-pr");
BENCHMARK_CAPTURE(BM_Forward, sinxcosy, "fn-2sinxcosy");
BENCHMARK(BM_RegressionGradient)->Arg(1)->Arg(64)->Arg(1024);
BENCHMARK(BM_TrajectoryGradient);

BENCHMARK_MAIN();
