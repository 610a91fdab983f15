#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nsindy/autodiff.hpp"
#include "nsindy/network.hpp"
#include "nsindy/training.hpp"

namespace nsindy {

/// K scalar trajectories sampled on one shared uniform time grid.
struct TrajectoryDataset {
  std::vector<double> times;   // N entries
  std::vector<double> values;  // K x N, row-major

  std::size_t trajectories() const noexcept { return times.empty() ? 0 : values.size() / times.size(); }
  std::size_t points() const noexcept { return times.size(); }
  double step() const { return times[1] - times[0]; }
  std::span<const double> trajectory(std::size_t k) const { return {values.data() + k * times.size(), times.size()}; }
  double initial(std::size_t k) const { return values[k * times.size()]; }
  /// Throws std::invalid_argument unless N >= 2, K >= 1, times strictly
  /// increasing and uniform (relative 1e-9), values finite.
  void validate() const;
};

struct BatchWindow {
  std::size_t trajectory = 0;
  std::size_t start = 0;
  std::size_t length = 0;
  friend bool operator==(const BatchWindow&, const BatchWindow&) = default;
};

/// Integration stops once |x| exceeds this bound.
inline constexpr double kBlowUpBound = 1e6;
/// Loss added per window whose prediction blew up.
inline constexpr double kBlowUpPenalty = 1e3;

/// One fixed step of the Dormand-Prince pair using its fifth-order weights.
template <class T, class F>
T rk5_step(F&& f, const T& x, double h) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                   b6 = 11.0 / 84.0;
  const T hh(h);
  const T k1 = f(x);
  const T k2 = f(x + hh * (T(a21) * k1));
  const T k3 = f(x + hh * (T(a31) * k1 + T(a32) * k2));
  const T k4 = f(x + hh * (T(a41) * k1 + T(a42) * k2 + T(a43) * k3));
  const T k5 = f(x + hh * (T(a51) * k1 + T(a52) * k2 + T(a53) * k3 + T(a54) * k4));
  const T k6 = f(x + hh * (T(a61) * k1 + T(a62) * k2 + T(a63) * k3 + T(a64) * k4 + T(a65) * k5));
  // This summation order makes the weights add to exactly 1.0 in doubles.
  return x + hh * (T(b1) * k1 + T(b3) * k3 + T(b5) * k5 + T(b4) * k4 + T(b6) * k6);
}

template <class T>
struct Trajectory {
  std::vector<T> values;  // values.size() < requested points iff blew_up
  bool blew_up = false;
};

/// Integrates x' = f(x) from x0 over `points` samples spaced by h, taking
/// `substeps` RK5 steps per sample interval.
template <class T, class F>
Trajectory<T> integrate(F&& f, const T& x0, double h, std::size_t points, std::size_t substeps = 1) {
  Trajectory<T> out;
  out.values.reserve(points);
  out.values.push_back(x0);
  T x = x0;
  const double dt = h / static_cast<double>(substeps);
  for (std::size_t i = 1; i < points; ++i) {
    for (std::size_t s = 0; s < substeps; ++s) x = rk5_step<T>(f, x, dt);
    const double v = value_of(x);
    if (!std::isfinite(v) || std::abs(v) > kBlowUpBound) {
      out.blew_up = true;
      return out;
    }
    out.values.push_back(x);
  }
  return out;
}

/// Convenience for real-valued fields on a uniform grid.
Trajectory<double> integrate(const std::function<double(double)>& f, double x0, std::span<const double> times);

/// n_batch trajectories (without replacement when n_batch <= K) with one
/// uniformly random valid start each. Throws if l_batch > N.
std::vector<BatchWindow> sample_windows(const TrajectoryDataset& data, std::size_t n_batch, std::size_t l_batch,
                                        Rng& rng);

/// Every trajectory from its first sample over the full length.
std::vector<BatchWindow> full_windows(const TrajectoryDataset& data);

/// (1/n_windows) * sum_windows sum_points |x_pred - x_obs| + lambda ||theta_active||_1.
/// Predictions restart from the observed value at each window start.
double trajectory_loss(const NetworkSpec& spec, const FlatParams& params, const TrajectoryDataset& data,
                       std::span<const BatchWindow> windows, double lambda);

struct TrajectoryLossTerms {
  Var total;
  double squared_error = 0.0;  // sum of squared point errors (non-blown windows)
  std::size_t compared = 0;    // number of compared points, starts excluded
  std::size_t blown = 0;
};

TrajectoryLossTerms trajectory_loss_var(const NetworkSpec& spec, std::span<const Var> theta,
                                        std::span<const std::uint8_t> mask, const TrajectoryDataset& data,
                                        std::span<const BatchWindow> windows, double lambda);

/// Integrates f_true from uniform initial conditions in [x0_low, x0_high]
/// with 10 RK5 substeps per sample. Initial conditions that blow up, or
/// that equal x0_low when x0_low_exclusive is set, are redrawn (<= 100 times).
TrajectoryDataset generate_trajectories(const std::function<double(double)>& f_true, std::size_t K, std::size_t N,
                                        double t0, double t1, double x0_low, double x0_high, Rng& rng,
                                        bool x0_low_exclusive = false);

/// Mean squared difference between the network and f_true on an n-point
/// uniform grid over [low, high].
double field_mse(const NetworkSpec& spec, const FlatParams& params, const std::function<double(double)>& f_true,
                 double low, double high, std::size_t n = 10000);

/// Mean squared error of full-trajectory predictions from each initial
/// condition; infinity if any prediction blows up.
double trajectory_mse(const NetworkSpec& spec, const FlatParams& params, const TrajectoryDataset& data);

/// ODE right-hand-side discovery with the shared training loop. Each step
/// draws fresh windows; the monitored error is the mean squared point error
/// over the windows seen in the epoch.
TrainReport train_ode(NetworkSpec& spec, const TrajectoryDataset& data, const TrainConfig& config);

}  // namespace nsindy
