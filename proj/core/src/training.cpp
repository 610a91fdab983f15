#include "nsindy/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <thread>

#include "nsindy/symbolic.hpp"

namespace nsindy {

std::string to_string(LassoSchedule s) { return s == LassoSchedule::oscillating ? "oscillating" : "constant"; }

std::string to_string(InitDistribution d) {
  switch (d) {
    case InitDistribution::normal: return "normal";
    case InitDistribution::uniform: return "uniform";
    case InitDistribution::constant: return "constant";
  }
  return "?";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::max_epochs: return "max-epochs";
    case StopReason::patience: return "patience";
    case StopReason::diverged: return "diverged";
  }
  return "?";
}

LassoSchedule parse_lasso_schedule(const std::string& s) {
  if (s == "constant") return LassoSchedule::constant;
  if (s == "oscillating") return LassoSchedule::oscillating;
  throw std::invalid_argument("unknown lasso schedule '" + s + "' (expected constant or oscillating)");
}

InitDistribution parse_init_distribution(const std::string& s) {
  if (s == "normal") return InitDistribution::normal;
  if (s == "uniform") return InitDistribution::uniform;
  if (s == "constant") return InitDistribution::constant;
  throw std::invalid_argument("unknown init distribution '" + s + "' (expected normal, uniform or constant)");
}

void SampleSet::validate() const {
  if (arity == 0) throw std::invalid_argument("sample set arity must be positive");
  if (targets.empty()) throw std::invalid_argument("sample set is empty");
  if (inputs.size() != targets.size() * arity) throw std::invalid_argument("sample set inputs/targets size mismatch");
  for (double v : inputs) {
    if (!std::isfinite(v)) throw std::invalid_argument("sample set contains a non-finite input");
  }
  for (double v : targets) {
    if (!std::isfinite(v)) throw std::invalid_argument("sample set contains a non-finite target");
  }
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (learning_rate < 0.0 || lambda0 < 0.0 || noise_alpha < 0.0) {
    throw std::invalid_argument("learning rate, lambda0 and noise alpha must be >= 0");
  }
  if (lr_decay && (lr_decay->factor < 0.0 || lr_decay->every < 1)) throw std::invalid_argument("invalid lr decay");
  if (prune && (prune->n_consecutive < 1 || prune->every < 1 || prune->epsilon < 0.0)) {
    throw std::invalid_argument("invalid pruning settings (n_prune and cadence must be >= 1)");
  }
  if (patience && (patience->threshold <= 0.0 || patience->epochs < 1)) {
    throw std::invalid_argument("patience threshold must be > 0 and epochs >= 1");
  }
  if (ode.n_batch == 0 || ode.l_batch < 2) throw std::invalid_argument("ODE batches need n_batch >= 1 and l_batch >= 2");
}

bool operator==(const TrainReport& a, const TrainReport& b) {
  const bool mse_equal = (std::isnan(a.final_mse) && std::isnan(b.final_mse)) || a.final_mse == b.final_mse;
  return a.history == b.history && a.params == b.params && a.stop_reason == b.stop_reason &&
         a.message == b.message && mse_equal;
}

double lasso_coefficient(int epoch, double lambda0, LassoSchedule schedule) {
  if (schedule == LassoSchedule::constant) return lambda0;
  return lambda0 * (1.0 + 0.5 * std::sin(static_cast<double>(epoch) / 10.0));
}

double l1_norm(const FlatParams& params) {
  double s = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.active(i)) s += std::abs(params.values[i]);
  }
  return s;
}

double mse(const NetworkSpec& spec, const FlatParams& params, const SampleSet& data) {
  if (data.arity != spec.input_arity()) throw ShapeError("mse: data arity does not match the network");
  Workspace<double> ws;
  double sse = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double d = forward_t<double>(spec, params.values, params.mask, data.input(r), ws) - data.targets[r];
    sse += d * d;
  }
  return sse / static_cast<double>(data.size());
}

double loss(const NetworkSpec& spec, const FlatParams& params, const SampleSet& batch, double lambda) {
  return mse(spec, params, batch) + lambda * l1_norm(params);
}

Var regression_loss_var(const NetworkSpec& spec, std::span<const Var> theta, std::span<const std::uint8_t> mask,
                        const SampleSet& data, std::span<const std::size_t> rows, double lambda, Var* data_term) {
  thread_local Workspace<Var> ws;
  std::vector<Var> x(data.arity);
  Var sse(0.0);
  bool first = true;
  for (std::size_t r : rows) {
    const auto in = data.input(r);
    for (std::size_t v = 0; v < data.arity; ++v) x[v] = Var(in[v]);
    const Var d = forward_t<Var>(spec, theta, mask, x, ws) - Var(data.targets[r]);
    const Var sq = square_of(d);
    sse = first ? sq : sse + sq;
    first = false;
  }
  const Var mean = sse * Var(1.0 / static_cast<double>(rows.size()));
  if (data_term) *data_term = mean;
  if (lambda == 0.0) return mean;
  Var penalty(0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (mask[i]) penalty = penalty + abs_of(theta[i]);
  }
  return mean + Var(lambda) * penalty;
}

AdamState::AdamState(std::size_t n, double b1, double b2, double eps)
    : m(n, 0.0), v(n, 0.0), beta1(b1), beta2(b2), epsilon(eps) {}

void adam_step(AdamState& state, FlatParams& params, std::span<const double> grad, double learning_rate) {
  if (grad.size() != params.size() || state.m.size() != params.size()) {
    throw ShapeError("adam_step: gradient/state length mismatch");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params.active(i)) continue;
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params.values[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

std::vector<double> inject_noise(std::span<const double> grad, double learning_rate, double mse,
                                 const FlatParams& params, double alpha, Rng& rng) {
  std::vector<double> out(grad.begin(), grad.end());
  if (alpha == 0.0) return out;
  const double scale = alpha * learning_rate * std::min(mse, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!params.active(i)) continue;
    const double sd = scale * std::abs(params.values[i]);
    if (!(sd > 0.0)) continue;
    std::normal_distribution<double> noise(0.0, sd);
    out[i] += noise(rng);
  }
  return out;
}

void update_prune_counters(const FlatParams& params, double epsilon, std::vector<int>& counters) {
  counters.resize(params.size(), 0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.active(i) && std::abs(params.values[i]) < epsilon) {
      ++counters[i];
    } else {
      counters[i] = 0;
    }
  }
}

std::vector<std::size_t> prune_step(FlatParams& params, std::span<const int> counters, double current_mse,
                                    const PruneConfig& config) {
  std::vector<std::size_t> pruned;
  if (!(current_mse < config.mse_threshold)) return pruned;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params.active(i)) continue;
    if (std::abs(params.values[i]) < config.epsilon && counters[i] >= config.n_consecutive) {
      params.mask[i] = 0;
      params.values[i] = 0.0;
      pruned.push_back(i);
    }
  }
  return pruned;
}

bool is_prune_epoch(int epoch, const PruneConfig& config) {
  const int completed = epoch + 1;
  if (config.first_at > 0 && completed == config.first_at) return true;
  return completed % config.every == 0;
}

void initialize_params(FlatParams& params, const InitConfig& init, Rng& rng) {
  std::vector<std::uint8_t> is_bias(params.size(), 0);
  for (const auto& block : params.layout) {
    if (block.name.ends_with(".bias")) std::fill_n(is_bias.begin() + static_cast<std::ptrdiff_t>(block.offset), block.count, 1);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params.active(i)) continue;
    if (!init.biases && is_bias[i]) {
      params.values[i] = 0.0;
      continue;
    }
    switch (init.distribution) {
      case InitDistribution::normal: {
        std::normal_distribution<double> d(init.mean, init.stddev);
        params.values[i] = init.stddev > 0.0 ? d(rng) : init.mean;
        break;
      }
      case InitDistribution::uniform: {
        const double half = std::sqrt(3.0) * init.stddev;
        std::uniform_real_distribution<double> d(init.mean - half, init.mean + half);
        params.values[i] = half > 0.0 ? d(rng) : init.mean;
        break;
      }
      case InitDistribution::constant:
        params.values[i] = init.value;
        break;
    }
  }
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class RegressionProblem final : public TrainingProblem {
 public:
  RegressionProblem(const NetworkSpec& spec, const SampleSet& data, std::size_t batch_size)
      : spec_(spec), data_(data), batch_(batch_size == 0 ? data.size() : std::min(batch_size, data.size())) {
    order_.resize(data.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  std::size_t begin_epoch(Rng& rng) override {
    if (batch_ < data_.size()) std::shuffle(order_.begin(), order_.end(), rng);
    return (data_.size() + batch_ - 1) / batch_;
  }

  StepOutcome step(const FlatParams& params, double lambda, std::size_t step, Rng&) override {
    const std::size_t begin = step * batch_;
    const std::size_t end = std::min(begin + batch_, data_.size());
    const std::span<const std::size_t> rows(order_.data() + begin, end - begin);
    Var data_term;
    const auto vg = value_and_gradient(
        [&](std::span<const Var> theta) {
          return regression_loss_var(spec_, theta, params.mask, data_, rows, lambda, &data_term);
        },
        params);
    return {vg.value, data_term.value(), vg.gradient};
  }

  double epoch_mse(const FlatParams& params) override { return mse(spec_, params, data_); }

 private:
  const NetworkSpec& spec_;
  const SampleSet& data_;
  std::size_t batch_;
  std::vector<std::size_t> order_;
};

}  // namespace

TrainReport run_training(NetworkSpec& spec, TrainingProblem& problem, const TrainConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  Rng rng(config.seed);

  FlatParams params = flatten(spec);
  if (config.initialize) initialize_params(params, config.init, rng);
  params.apply_mask();

  AdamState adam(params.size(), config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  std::vector<int> counters(params.size(), 0);
  double learning_rate = config.learning_rate;
  const double stall_threshold = config.patience ? config.patience->threshold : 0.0;
  double previous_loss = std::numeric_limits<double>::quiet_NaN();
  double best_loss = std::numeric_limits<double>::infinity();
  int calm_epochs = 0;
  int stalled_epochs = 0;

  TrainReport report;
  report.stop_reason = StopReason::max_epochs;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lambda = lasso_coefficient(epoch, config.lambda0, config.lasso_schedule);
    const bool noisy = config.noise_alpha > 0.0 && stalled_epochs >= config.noise_stall_epochs;
    const std::size_t steps = problem.begin_epoch(rng);

    EpochRecord record;
    record.epoch = epoch;
    record.lambda = lambda;
    double loss_sum = 0.0;
    bool diverged = false;
    for (std::size_t s = 0; s < steps; ++s) {
      StepOutcome out;
      try {
        out = problem.step(params, lambda, s, rng);
      } catch (const NonFiniteLossError& e) {
        report.message = std::string("epoch ") + std::to_string(epoch) + ": " + e.what();
        diverged = true;
        break;
      }
      if (!std::isfinite(out.loss) || !all_finite(out.gradient)) {
        report.message = "epoch " + std::to_string(epoch) + ": non-finite loss or gradient";
        diverged = true;
        break;
      }
      if (noisy) {
        out.gradient = inject_noise(out.gradient, learning_rate, out.data_mse, params, config.noise_alpha, rng);
        ++record.noise_steps;
      }
      adam_step(adam, params, out.gradient, learning_rate);
      loss_sum += out.loss;
    }
    if (diverged) {
      report.stop_reason = StopReason::diverged;
      break;
    }

    record.loss = steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0;
    record.mse = problem.epoch_mse(params);
    if (!std::isfinite(record.mse)) {
      report.stop_reason = StopReason::diverged;
      report.message = "epoch " + std::to_string(epoch) + ": monitored error is not finite";
      break;
    }
    if (config.prune) {
      update_prune_counters(params, config.prune->epsilon, counters);
      if (is_prune_epoch(epoch, *config.prune)) record.pruned = prune_step(params, counters, record.mse, *config.prune);
    }
    record.active = params.active_count();
    record.lasso = lambda * l1_norm(params);
    if (config.formula_every > 0 && (epoch + 1) % config.formula_every == 0) {
      NetworkSpec snapshot = spec;
      unflatten(snapshot, params);
      record.formula = render(simplify(extract(snapshot, params), 0.0), 3);
    }
    report.history.push_back(std::move(record));
    const EpochRecord& rec = report.history.back();

    if (rec.loss < best_loss * (1.0 - stall_threshold)) {
      best_loss = rec.loss;
      stalled_epochs = 0;
    } else {
      ++stalled_epochs;
    }

    if (config.lr_decay && (epoch + 1) % config.lr_decay->every == 0) learning_rate *= config.lr_decay->factor;

    if (config.patience && epoch > 0) {
      const double denom = std::max(std::abs(previous_loss), std::numeric_limits<double>::min());
      const double rel = std::abs(rec.loss - previous_loss) / denom;
      calm_epochs = rel < config.patience->threshold ? calm_epochs + 1 : 0;
      if (calm_epochs >= config.patience->epochs) {
        previous_loss = rec.loss;
        report.stop_reason = StopReason::patience;
        break;
      }
    }
    previous_loss = rec.loss;
  }

  unflatten(spec, params);
  report.params = params;
  report.final_mse = problem.final_mse(params);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

TrainReport train_regression(NetworkSpec& spec, const SampleSet& data, const TrainConfig& config) {
  data.validate();
  if (data.arity != spec.input_arity()) throw ShapeError("train_regression: data arity does not match the network");
  RegressionProblem problem(spec, data, config.batch_size);
  return run_training(spec, problem, config);
}

TrainReport fit_classic_lasso(const std::vector<std::string>& dictionary, const SampleSet& data, double lambda,
                              const TrainConfig& config) {
  NetworkSpec spec = make_classic(dictionary, data.arity);
  TrainConfig cfg = config;
  cfg.lambda0 = lambda;
  cfg.lasso_schedule = LassoSchedule::constant;
  return train_regression(spec, data, cfg);
}

TrainReport final_tune(NetworkSpec& spec, const SampleSet& data, TrainConfig config) {
  config.lambda0 = 0.0;
  config.initialize = false;
  config.prune.reset();
  config.noise_alpha = 0.0;
  return train_regression(spec, data, config);
}

std::vector<SeedResult> run_seeds(std::span<const std::uint64_t> seeds, std::size_t threads,
                                  const std::function<SeedResult(std::uint64_t)>& run) {
  std::vector<SeedResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1)) {
      try {
        results[i] = run(seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, seeds.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::optional<std::size_t> best_seed(std::span<const SeedResult> results) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i].report;
    if (r.stop_reason == StopReason::diverged || std::isnan(r.final_mse)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = results[*best].report;
    if (r.final_mse < b.final_mse ||
        (r.final_mse == b.final_mse && r.params.active_count() < b.params.active_count())) {
      best = i;
    }
  }
  return best;
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("NSINDY_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace nsindy
