#include "nsindy/odedisc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nsindy {

void TrajectoryDataset::validate() const {
  const std::size_t n = times.size();
  if (n < 2) throw std::invalid_argument("trajectory dataset needs at least 2 time points");
  if (values.empty() || values.size() % n != 0) throw std::invalid_argument("trajectory values are not K x N");
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw std::invalid_argument("trajectory times must be strictly increasing");
  for (std::size_t i = 1; i < n; ++i) {
    const double d = times[i] - times[i - 1];
    if (!(d > 0.0) || std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(times[i]))) {
      throw std::invalid_argument("trajectory times must be uniform");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("trajectory dataset contains a non-finite value");
  }
}

Trajectory<double> integrate(const std::function<double(double)>& f, double x0, std::span<const double> times) {
  if (times.size() < 2) return {{x0}, false};
  return integrate<double>(f, x0, times[1] - times[0], times.size());
}

std::vector<BatchWindow> sample_windows(const TrajectoryDataset& data, std::size_t n_batch, std::size_t l_batch,
                                        Rng& rng) {
  const std::size_t K = data.trajectories();
  const std::size_t N = data.points();
  if (l_batch > N) throw std::invalid_argument("window length exceeds trajectory length");
  if (l_batch == 0 || K == 0) throw std::invalid_argument("sample_windows: empty windows or dataset");

  std::vector<std::size_t> picked;
  if (n_batch <= K) {
    std::vector<std::size_t> all(K);
    std::iota(all.begin(), all.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n_batch entries form the sample.
    for (std::size_t i = 0; i < n_batch; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, K - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    picked.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_batch));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, K - 1);
    for (std::size_t i = 0; i < n_batch; ++i) picked.push_back(pick(rng));
  }

  std::vector<BatchWindow> windows;
  windows.reserve(n_batch);
  std::uniform_int_distribution<std::size_t> start(0, N - l_batch);
  for (auto k : picked) windows.push_back({k, start(rng), l_batch});
  return windows;
}

std::vector<BatchWindow> full_windows(const TrajectoryDataset& data) {
  std::vector<BatchWindow> windows;
  for (std::size_t k = 0; k < data.trajectories(); ++k) windows.push_back({k, 0, data.points()});
  return windows;
}

TrajectoryLossTerms trajectory_loss_var(const NetworkSpec& spec, std::span<const Var> theta,
                                        std::span<const std::uint8_t> mask, const TrajectoryDataset& data,
                                        std::span<const BatchWindow> windows, double lambda) {
  if (spec.input_arity() != 1) throw ShapeError("ODE discovery needs a scalar (arity 1) network");
  thread_local Workspace<Var> ws;
  const double h = data.step();
  auto field = [&](const Var& x) { return forward_t<Var>(spec, theta, mask, std::span<const Var>(&x, 1), ws); };

  TrajectoryLossTerms terms;
  Var data_sum(0.0);
  double penalty_sum = 0.0;
  for (const auto& w : windows) {
    if (w.trajectory >= data.trajectories() || w.start + w.length > data.points()) {
      throw std::out_of_range("trajectory window out of range");
    }
    const auto obs = data.trajectory(w.trajectory).subspan(w.start, w.length);
    const auto pred = integrate<Var>(field, Var(obs[0]), h, w.length);
    for (std::size_t i = 1; i < pred.values.size(); ++i) {
      const Var err = pred.values[i] - Var(obs[i]);
      data_sum = data_sum + abs_of(err);
      if (!pred.blew_up) {
        terms.squared_error += err.value() * err.value();
        ++terms.compared;
      }
    }
    if (pred.blew_up) {
      penalty_sum += kBlowUpPenalty;
      ++terms.blown;
    }
  }
  const double inv = 1.0 / static_cast<double>(std::max<std::size_t>(windows.size(), 1));
  Var total = (data_sum + Var(penalty_sum)) * Var(inv);
  if (lambda != 0.0) {
    Var l1(0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (mask[i]) l1 = l1 + abs_of(theta[i]);
    }
    total = total + Var(lambda) * l1;
  }
  terms.total = total;
  return terms;
}

double trajectory_loss(const NetworkSpec& spec, const FlatParams& params, const TrajectoryDataset& data,
                       std::span<const BatchWindow> windows, double lambda) {
  std::vector<Var> theta(params.values.begin(), params.values.end());
  return trajectory_loss_var(spec, theta, params.mask, data, windows, lambda).total.value();
}

TrajectoryDataset generate_trajectories(const std::function<double(double)>& f_true, std::size_t K, std::size_t N,
                                        double t0, double t1, double x0_low, double x0_high, Rng& rng,
                                        bool x0_low_exclusive) {
  if (K == 0 || N < 2) throw std::invalid_argument("generate_trajectories needs K >= 1 and N >= 2");
  if (!(t1 > t0)) throw std::invalid_argument("generate_trajectories needs t1 > t0");
  TrajectoryDataset data;
  data.times.resize(N);
  const double h = (t1 - t0) / static_cast<double>(N - 1);
  for (std::size_t i = 0; i < N; ++i) data.times[i] = t0 + h * static_cast<double>(i);
  data.values.reserve(K * N);

  std::uniform_real_distribution<double> x0_dist(x0_low, x0_high);
  for (std::size_t k = 0; k < K; ++k) {
    bool done = false;
    for (int attempt = 0; attempt < 100 && !done; ++attempt) {
      const double x0 = x0_dist(rng);
      if (x0_low_exclusive && x0 <= x0_low) continue;
      const auto traj = integrate<double>(f_true, x0, h, N, 10);
      if (traj.blew_up) continue;
      data.values.insert(data.values.end(), traj.values.begin(), traj.values.end());
      done = true;
    }
    if (!done) throw std::runtime_error("generate_trajectories: true field blows up for every sampled x0");
  }
  return data;
}

double field_mse(const NetworkSpec& spec, const FlatParams& params, const std::function<double(double)>& f_true,
                 double low, double high, std::size_t n) {
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = n == 1 ? low : low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double d = forward(spec, params, std::span<const double>(&x, 1)) - f_true(x);
    sse += d * d;
  }
  return sse / static_cast<double>(n);
}

double trajectory_mse(const NetworkSpec& spec, const FlatParams& params, const TrajectoryDataset& data) {
  Workspace<double> ws;
  auto field = [&](double x) { return forward_t<double>(spec, params.values, params.mask, std::span<const double>(&x, 1), ws); };
  double sse = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < data.trajectories(); ++k) {
    const auto obs = data.trajectory(k);
    const auto pred = integrate<double>(field, obs[0], data.step(), obs.size());
    if (pred.blew_up) return std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < obs.size(); ++i) {
      const double d = pred.values[i] - obs[i];
      sse += d * d;
      ++count;
    }
  }
  return count ? sse / static_cast<double>(count) : 0.0;
}

namespace {

class OdeProblem final : public TrainingProblem {
 public:
  OdeProblem(const NetworkSpec& spec, const TrajectoryDataset& data, const OdeBatchConfig& batch)
      : spec_(spec), data_(data), batch_(batch) {}

  std::size_t begin_epoch(Rng&) override {
    squared_error_ = 0.0;
    compared_ = 0;
    blown_ = 0;
    if (batch_.steps_per_epoch > 0) return batch_.steps_per_epoch;
    return (data_.trajectories() + batch_.n_batch - 1) / batch_.n_batch;
  }

  StepOutcome step(const FlatParams& params, double lambda, std::size_t, Rng& rng) override {
    const auto windows = sample_windows(data_, batch_.n_batch, std::min(batch_.l_batch, data_.points()), rng);
    TrajectoryLossTerms terms;
    const auto vg = value_and_gradient(
        [&](std::span<const Var> theta) {
          terms = trajectory_loss_var(spec_, theta, params.mask, data_, windows, lambda);
          return terms.total;
        },
        params);
    squared_error_ += terms.squared_error;
    compared_ += terms.compared;
    blown_ += terms.blown;
    const double step_mse = terms.compared ? terms.squared_error / static_cast<double>(terms.compared) : 0.0;
    return {vg.value, terms.blown ? 1.0 : step_mse, vg.gradient};
  }

  double epoch_mse(const FlatParams& params) override {
    if (compared_ == 0 && blown_ == 0) return final_mse(params);
    // A blown window counts as an error of order one, keeping pruning off.
    if (blown_ > 0) return std::max(1.0, compared_ ? squared_error_ / static_cast<double>(compared_) : 1.0);
    return squared_error_ / static_cast<double>(compared_);
  }

  double final_mse(const FlatParams& params) override { return trajectory_mse(spec_, params, data_); }

 private:
  const NetworkSpec& spec_;
  const TrajectoryDataset& data_;
  OdeBatchConfig batch_;
  double squared_error_ = 0.0;
  std::size_t compared_ = 0;
  std::size_t blown_ = 0;
};

}  // namespace

TrainReport train_ode(NetworkSpec& spec, const TrajectoryDataset& data, const TrainConfig& config) {
  data.validate();
  if (spec.input_arity() != 1) throw ShapeError("train_ode needs a scalar (arity 1) network");
  OdeProblem problem(spec, data, config.ode);
  return run_training(spec, problem, config);
}

}  // namespace nsindy
