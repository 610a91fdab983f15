#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nsindy/network.hpp"
#include "nsindy/params.hpp"

namespace nsindy {

using Rng = std::mt19937_64;

enum class LassoSchedule { constant, oscillating };
enum class InitDistribution { normal, uniform, constant };
enum class StopReason { max_epochs, patience, diverged };

std::string to_string(LassoSchedule s);
std::string to_string(InitDistribution d);
std::string to_string(StopReason r);
LassoSchedule parse_lasso_schedule(const std::string& s);
InitDistribution parse_init_distribution(const std::string& s);

/// Regression data: N rows of `arity` inputs, row-major, plus targets.
struct SampleSet {
  std::size_t arity = 1;
  std::vector<double> inputs;
  std::vector<double> targets;

  std::size_t size() const noexcept { return targets.size(); }
  std::span<const double> input(std::size_t i) const { return {inputs.data() + i * arity, arity}; }
  void validate() const;
};

struct LrDecay {
  double factor = 1.0;
  int every = 1;  // epochs
  friend bool operator==(const LrDecay&, const LrDecay&) = default;
};

/// Coordinate i is pruned when the monitored MSE is below mse_threshold and
/// |theta_i| < epsilon has held for n_consecutive epochs. Pruning is checked
/// after epochs first_at, and every `every` epochs (1-based epoch counts).
struct PruneConfig {
  double mse_threshold = std::numeric_limits<double>::infinity();
  double epsilon = 0.01;
  int n_consecutive = 1;
  int every = 1;
  int first_at = 0;
  friend bool operator==(const PruneConfig&, const PruneConfig&) = default;
};

struct PatienceConfig {
  double threshold = 1e-2;
  int epochs = 50;
  friend bool operator==(const PatienceConfig&, const PatienceConfig&) = default;
};

struct InitConfig {
  InitDistribution distribution = InitDistribution::normal;
  double mean = 0.0;
  double stddev = 0.5;
  double value = 0.0;  // constant distribution
  bool biases = true;  // false: biases start at zero
  friend bool operator==(const InitConfig&, const InitConfig&) = default;
};

/// Window sampling for ODE training. steps_per_epoch == 0 means
/// ceil(K / n_batch), i.e. every trajectory is visited once per epoch in
/// expectation.
struct OdeBatchConfig {
  std::size_t n_batch = 30;
  std::size_t l_batch = 5;
  std::size_t steps_per_epoch = 0;
  friend bool operator==(const OdeBatchConfig&, const OdeBatchConfig&) = default;
};

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 1e-3;
  std::optional<LrDecay> lr_decay;
  double lambda0 = 1e-3;
  LassoSchedule lasso_schedule = LassoSchedule::constant;
  double noise_alpha = 0.0;
  int noise_stall_epochs = 100;
  std::optional<PruneConfig> prune;
  std::optional<PatienceConfig> patience;
  std::size_t batch_size = 0;  // 0: full batch
  OdeBatchConfig ode;
  InitConfig init;
  bool initialize = true;  // false: continue from the network's current weights
  std::uint64_t seed = 0;
  int formula_every = 0;  // record the rendered formula every n epochs (0: never)
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
  int epoch = 0;
  double mse = 0.0;     // monitored data error after the epoch
  double lasso = 0.0;   // lambda(epoch) * ||theta||_1 after the epoch
  double lambda = 0.0;
  double loss = 0.0;    // mean optimized loss over the epoch's steps
  std::size_t active = 0;
  std::vector<std::size_t> pruned;
  int noise_steps = 0;
  std::string formula;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainReport {
  std::vector<EpochRecord> history;
  FlatParams params;
  StopReason stop_reason = StopReason::max_epochs;
  std::string message;
  double final_mse = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;

  /// Compares everything except wall time.
  friend bool operator==(const TrainReport& a, const TrainReport& b);
};

/// lambda0 * (1 + 0.5 sin(epoch / 10)) when oscillating, lambda0 otherwise.
double lasso_coefficient(int epoch, double lambda0, LassoSchedule schedule);

/// Sum of |theta_i| over active coordinates.
double l1_norm(const FlatParams& params);

/// Mean squared error of the network over every sample.
double mse(const NetworkSpec& spec, const FlatParams& params, const SampleSet& data);

/// Mean squared error plus lambda * ||theta_active||_1.
double loss(const NetworkSpec& spec, const FlatParams& params, const SampleSet& batch, double lambda);

/// Differentiable version of loss() restricted to the given rows.
Var regression_loss_var(const NetworkSpec& spec, std::span<const Var> theta, std::span<const std::uint8_t> mask,
                        const SampleSet& data, std::span<const std::size_t> rows, double lambda,
                        Var* data_term = nullptr);

struct AdamState {
  explicit AdamState(std::size_t n = 0, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double beta1;
  double beta2;
  double epsilon;
};

/// Bias-corrected Adam update on active coordinates only.
void adam_step(AdamState& state, FlatParams& params, std::span<const double> grad, double learning_rate);

/// grad + N(0, alpha * lr * min(mse, 1) * |theta_i|) per active coordinate.
std::vector<double> inject_noise(std::span<const double> grad, double learning_rate, double mse,
                                 const FlatParams& params, double alpha, Rng& rng);

/// Consecutive-epoch counters of |theta_i| < epsilon; reset otherwise.
void update_prune_counters(const FlatParams& params, double epsilon, std::vector<int>& counters);

/// Masks coordinates that satisfy both pruning conditions. Masking is
/// permanent. Returns the newly pruned indices.
std::vector<std::size_t> prune_step(FlatParams& params, std::span<const int> counters, double current_mse,
                                    const PruneConfig& config);

bool is_prune_epoch(int epoch, const PruneConfig& config);

/// Draws every active coordinate from the configured distribution.
void initialize_params(FlatParams& params, const InitConfig& init, Rng& rng);

struct StepOutcome {
  double loss = 0.0;
  double data_mse = 0.0;  // feeds the noise amplitude
  std::vector<double> gradient;
};

/// One optimization problem driven by run_training.
class TrainingProblem {
 public:
  virtual ~TrainingProblem() = default;
  /// Prepares an epoch and returns its number of optimizer steps.
  virtual std::size_t begin_epoch(Rng& rng) = 0;
  virtual StepOutcome step(const FlatParams& params, double lambda, std::size_t step, Rng& rng) = 0;
  /// Error monitored for pruning and reporting once the epoch is over.
  virtual double epoch_mse(const FlatParams& params) = 0;
  /// Error reported as TrainReport::final_mse.
  virtual double final_mse(const FlatParams& params) { return epoch_mse(params); }
};

/// Shared epoch loop: lambda schedule, Adam, stall-triggered gradient
/// noise, pruning cadence, patience and learning-rate decay.
TrainReport run_training(NetworkSpec& spec, TrainingProblem& problem, const TrainConfig& config);

/// Function-regression training. Updates spec's weights to the final
/// parameters and returns the report.
TrainReport train_regression(NetworkSpec& spec, const SampleSet& data, const TrainConfig& config);

/// Classic dictionary regression ||Y - F(X) theta||^2 + lambda ||theta||_1,
/// solved with the same loop.
TrainReport fit_classic_lasso(const std::vector<std::string>& dictionary, const SampleSet& data, double lambda,
                              const TrainConfig& config);

/// Re-optimizes surviving constants on pure MSE with the mask frozen.
TrainReport final_tune(NetworkSpec& spec, const SampleSet& data, TrainConfig config);

/// Outcome of one seed in a multi-seed search.
struct SeedResult {
  std::uint64_t seed = 0;
  NetworkSpec spec;
  TrainReport report;
};

/// Runs `run` for every seed using up to `threads` workers. Results are in
/// seed order regardless of completion order.
std::vector<SeedResult> run_seeds(std::span<const std::uint64_t> seeds, std::size_t threads,
                                  const std::function<SeedResult(std::uint64_t)>& run);

/// Lowest final MSE, ties broken by fewer active parameters. Diverged runs
/// are skipped; returns nullopt when every run diverged.
std::optional<std::size_t> best_seed(std::span<const SeedResult> results);

/// NSINDY_THREADS if set, otherwise the hardware concurrency.
std::size_t default_thread_count();

}  // namespace nsindy
