#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "nsindy/training.hpp"

using namespace nsindy;

namespace {

SampleSet sample(const std::function<double(double)>& f, std::size_t n, double low, double high) {
  SampleSet s;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1);
    s.inputs.push_back(x);
    s.targets.push_back(f(x));
  }
  return s;
}

// Ordinary least squares on the dictionary design matrix.
Eigen::VectorXd ols(const std::vector<std::string>& names, const SampleSet& s) {
  const auto d = make_dictionary(names);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(names.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) A(Eigen::Index(i), Eigen::Index(j)) = eval(d[j], s.inputs[i]);
    y(Eigen::Index(i)) = s.targets[i];
  }
  return A.colPivHouseholderQr().solve(y);
}

TrainConfig lasso_config() {
  TrainConfig c;
  c.epochs = 3000;
  c.learning_rate = 1e-2;
  c.lr_decay = LrDecay{0.999, 1};
  c.init = InitConfig{InitDistribution::constant, 0.0, 0.0, 0.0};
  c.prune = PruneConfig{INFINITY, 0.01, 50, 1, 0};
  c.seed = 1;
  return c;
}

FlatParams one(double v) {
  FlatParams p;
  p.values = {v};
  p.mask = {1};
  return p;
}

}  // namespace

TEST(Lasso, Schedule) {
  EXPECT_EQ(lasso_coefficient(0, 1e-4, LassoSchedule::oscillating), 1e-4);
  EXPECT_NEAR(lasso_coefficient(16, 1e-4, LassoSchedule::oscillating), 1.499787e-4, 1e-10);
  EXPECT_EQ(lasso_coefficient(16, 1e-4, LassoSchedule::constant), 1e-4);
  for (int e = 0; e <= 1000; ++e) {
    const double l = lasso_coefficient(e, 2.0, LassoSchedule::oscillating);
    EXPECT_GE(l, 1.0);
    EXPECT_LE(l, 3.0);
  }
}

TEST(Loss, HandComputed) {
  auto spec = make_classic({"identity"});
  auto p = flatten(spec);
  p.values = {1.0};
  SampleSet s;
  s.inputs = {2.0};
  s.targets = {0.0};
  EXPECT_DOUBLE_EQ(loss(spec, p, s, 0.1), 4.1);
  p.mask = {0};
  p.apply_mask();
  EXPECT_DOUBLE_EQ(loss(spec, p, s, 0.1), 0.0);
  s.targets = {3.0};
  EXPECT_DOUBLE_EQ(loss(spec, p, s, 0.1), 9.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto p = one(1.0);
  AdamState st(1);
  const std::vector<double> g = {0.3};
  adam_step(st, p, g, 1e-3);
  EXPECT_NEAR(1.0 - p.values[0], 1e-3, 1e-10);

  auto q = one(1.0);
  AdamState st2(1);
  for (int i = 0; i < 100; ++i) adam_step(st2, q, std::vector<double>{0.0}, 1e-3);
  EXPECT_EQ(q.values[0], 1.0);

  auto m = one(0.0);
  m.mask = {0};
  AdamState st3(1);
  adam_step(st3, m, g, 1e-3);
  EXPECT_EQ(m.values[0], 0.0);
}

TEST(Noise, StandardDeviation) {
  Rng rng(5);
  auto p = one(0.5);
  const std::vector<double> g = {0.0};
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = inject_noise(g, 0.01, 2.0, p, 16.0, rng)[0];
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_NEAR(sd, 0.08, 0.08 * 0.02);

  const std::vector<double> g2 = {0.25};
  EXPECT_EQ(inject_noise(g2, 0.01, 2.0, p, 0.0, rng), g2);
  EXPECT_EQ(inject_noise(g2, 0.01, 2.0, one(0.0), 16.0, rng), g2);
}

TEST(Prune, TruthTable) {
  const PruneConfig config{0.01, 0.01, 2, 1, 0};
  for (int bits = 0; bits < 8; ++bits) {
    const bool mse_ok = bits & 1, small = bits & 2, long_enough = bits & 4;
    auto p = one(small ? 0.005 : 0.5);
    const std::vector<int> counters = {long_enough ? 2 : 1};
    const auto pruned = prune_step(p, counters, mse_ok ? 0.001 : 0.5, config);
    const bool expect = mse_ok && small && long_enough;
    EXPECT_EQ(pruned.size(), expect ? 1u : 0u) << bits;
    EXPECT_EQ(p.mask[0], expect ? 0 : 1) << bits;
  }
  auto masked = one(0.0);
  masked.mask = {0};
  EXPECT_TRUE(prune_step(masked, std::vector<int>{5}, 0.0, config).empty());
  EXPECT_EQ(masked.mask[0], 0);
}

TEST(Prune, CountersResetAboveEpsilon) {
  std::vector<int> counters;
  auto p = one(0.001);
  update_prune_counters(p, 0.01, counters);
  update_prune_counters(p, 0.01, counters);
  EXPECT_EQ(counters[0], 2);
  p.values[0] = 0.5;
  update_prune_counters(p, 0.01, counters);
  EXPECT_EQ(counters[0], 0);
}

TEST(Prune, Schedule) {
  const PruneConfig c{INFINITY, 0.05, 1, 30, 0};
  EXPECT_FALSE(is_prune_epoch(0, c));
  EXPECT_TRUE(is_prune_epoch(29, c));
  EXPECT_TRUE(is_prune_epoch(59, c));
  const PruneConfig late{INFINITY, 0.01, 1, 50, 10};
  EXPECT_TRUE(is_prune_epoch(9, late));
  EXPECT_FALSE(is_prune_epoch(10, late));
  EXPECT_TRUE(is_prune_epoch(49, late));
}

TEST(Train, RecoversLinearTarget) {
  const auto data = sample([](double x) { return 2.0 * x; }, 200, -2.0, 2.0);
  auto spec = make_classic({"identity", "sin"});
  TrainConfig c = lasso_config();
  c.epochs = 500;
  c.batch_size = 10;
  c.learning_rate = 0.02;
  c.lr_decay = LrDecay{0.993, 1};
  c.lambda0 = 1e-3;
  const auto r = train_regression(spec, data, c);
  EXPECT_NEAR(r.params.values[0], 2.0, 0.01);
  EXPECT_EQ(r.params.mask[1], 0);
  EXPECT_EQ(r.stop_reason, StopReason::max_epochs);
}

TEST(Train, ZeroEpochsKeepsInitialParameters) {
  const auto data = sample([](double x) { return x; }, 10, 0.0, 1.0);
  auto spec = make_pr({"sin", "cos"}, 1, 2);
  TrainConfig c;
  c.epochs = 0;
  c.init = InitConfig{InitDistribution::constant, 0.0, 0.0, 0.2};
  const auto r = train_regression(spec, data, c);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.stop_reason, StopReason::max_epochs);
  for (double v : r.params.values) EXPECT_EQ(v, 0.2);
}

TEST(Train, Deterministic) {
  const auto data = sample([](double x) { return std::cos(x * x); }, 300, 0.0, 3.0);
  TrainConfig c;
  c.epochs = 40;
  c.batch_size = 64;
  c.lambda0 = 1e-3;
  c.lasso_schedule = LassoSchedule::oscillating;
  c.noise_alpha = 4.0;
  c.noise_stall_epochs = 5;
  c.prune = PruneConfig{INFINITY, 0.05, 3, 10, 0};
  c.seed = 99;
  auto a = make_pr({"sin", "cos", "exp"}, 1, 2);
  auto b = make_pr({"sin", "cos", "exp"}, 1, 2);
  auto ra = train_regression(a, data, c);
  auto rb = train_regression(b, data, c);
  ra.wall_seconds = rb.wall_seconds = 0.0;
  EXPECT_EQ(ra, rb);
}

TEST(Train, ActiveCountNonIncreasingAndMaskedStayZero) {
  const auto data = sample([](double x) { return std::sin(x); }, 200, -2.0, 2.0);
  TrainConfig c;
  c.epochs = 200;
  c.learning_rate = 1e-2;
  c.lambda0 = 1e-2;
  c.prune = PruneConfig{INFINITY, 0.05, 5, 1, 0};
  c.seed = 4;
  auto spec = make_pr({"sin", "square", "exp"}, 1, 2);
  const auto r = train_regression(spec, data, c);
  for (std::size_t e = 1; e < r.history.size(); ++e) EXPECT_LE(r.history[e].active, r.history[e - 1].active);
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (!r.params.active(i)) EXPECT_EQ(r.params.values[i], 0.0);
  }
}

TEST(Train, PatienceStopsAtFirstQualifyingEpoch) {
  const auto data = sample([](double x) { return 0.0 * x; }, 20, 0.0, 1.0);
  auto spec = make_classic({"identity"});
  TrainConfig c;
  c.epochs = 1000;
  c.init = InitConfig{InitDistribution::constant, 0.0, 0.0, 0.0};
  c.patience = PatienceConfig{1e-2, 7};
  const auto r = train_regression(spec, data, c);
  // Zero loss never changes: epochs 1..7 are calm, so training ends after epoch index 7.
  EXPECT_EQ(r.stop_reason, StopReason::patience);
  EXPECT_EQ(r.history.size(), 8u);
}

TEST(Train, LossNonIncreasingOnConvexProblem) {
  const auto data = sample([](double x) { return 1.5 * std::sin(x) + 0.5 * x * x; }, 100, -2.0, 2.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto spec = make_classic({"sin", "square", "exp"});
    TrainConfig c;
    c.epochs = 500;
    c.learning_rate = 1e-3;
    c.lambda0 = 0.0;
    c.seed = seed;
    const auto r = train_regression(spec, data, c);
    for (std::size_t e = 50; e < r.history.size(); e += 50) EXPECT_LE(r.history[e].loss, r.history[e - 50].loss);
  }
}

TEST(Train, DivergenceStopsWithPartialReport) {
  const auto data = sample([](double x) { return x; }, 10, 0.0, 1.0);
  auto spec = make_classic({"identity"});
  TrainConfig c;
  c.epochs = 10;
  c.init = InitConfig{InitDistribution::constant, 0.0, 0.0, 1e300};
  const auto r = train_regression(spec, data, c);
  EXPECT_EQ(r.stop_reason, StopReason::diverged);
  EXPECT_FALSE(r.message.empty());
}

TEST(ClassicLasso, MatchesLeastSquares) {
  const std::vector<std::string> names = {"sin", "square", "exp"};
  const auto data = sample([](double x) { return 1.5 * std::sin(x) + 0.5 * x * x; }, 200, -2.0, 2.0);
  const auto oracle = ols(names, data);
  EXPECT_NEAR(oracle(0), 1.5, 1e-9);
  EXPECT_NEAR(oracle(1), 0.5, 1e-9);
  EXPECT_NEAR(oracle(2), 0.0, 1e-9);
  const auto r = fit_classic_lasso(names, data, 1e-3, lasso_config());
  EXPECT_NEAR(r.params.values[0], oracle(0), 1e-2);
  EXPECT_NEAR(r.params.values[1], oracle(1), 1e-2);
  EXPECT_EQ(r.params.mask[2], 0);
}

TEST(ClassicLasso, ExactSystemWithoutPenalty) {
  const auto data = sample([](double x) { return 0.7 * x * x - 0.2 * std::sin(x); }, 50, -2.0, 2.0);
  TrainConfig c = lasso_config();
  c.prune.reset();
  const auto r = fit_classic_lasso({"sin", "square"}, data, 0.0, c);
  EXPECT_LT(r.final_mse, 1e-8);
}

TEST(ClassicLasso, HugePenaltyPrunesEverything) {
  const auto data = sample([](double x) { return 1.5 * std::sin(x) + 0.5 * x * x; }, 200, -2.0, 2.0);
  TrainConfig c = lasso_config();
  c.init = InitConfig{InitDistribution::normal, 0.0, 0.5, 0.0};
  c.prune = PruneConfig{INFINITY, 0.01, 5, 1, 0};
  const auto r = fit_classic_lasso({"sin", "square", "exp"}, data, 1e6, c);
  EXPECT_EQ(r.params.active_count(), 0u);
}

TEST(Seeds, BestSeedPicksLowestFiniteMse) {
  std::vector<SeedResult> rs(3);
  rs[0].report.final_mse = 0.5;
  rs[1].report.final_mse = NAN;
  rs[2].report.final_mse = 0.1;
  EXPECT_EQ(best_seed(rs), 2u);
  rs[2].report.stop_reason = StopReason::diverged;
  EXPECT_EQ(best_seed(rs), 0u);
}

TEST(Seeds, RunSeedsPreservesOrder) {
  const std::vector<std::uint64_t> seeds = {5, 6, 7, 8};
  const auto rs = run_seeds(seeds, 3, [](std::uint64_t s) {
    SeedResult r;
    r.seed = s;
    return r;
  });
  for (std::size_t i = 0; i < seeds.size(); ++i) EXPECT_EQ(rs[i].seed, seeds[i]);
}

TEST(Config, Validation) {
  TrainConfig c;
  c.prune = PruneConfig{INFINITY, 0.01, 0, 1, 0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.prune.reset();
  c.learning_rate = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
