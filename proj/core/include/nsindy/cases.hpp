#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsindy/network.hpp"
#include "nsindy/odedisc.hpp"
#include "nsindy/symbolic.hpp"
#include "nsindy/training.hpp"

namespace nsindy {

class UnknownCaseError : public std::invalid_argument {
 public:
  UnknownCaseError(const std::string& id, const std::vector<std::string>& valid);
};

enum class ProblemKind { function, ode };

std::string to_string(ProblemKind k);
ProblemKind parse_problem_kind(const std::string& s);

struct Interval {
  double low = 0.0;
  double high = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// How a case's data is generated. For ODE cases `domain` holds the single
/// range of initial conditions and `n` is the number of trajectories.
struct DatasetSpec {
  std::string id;
  ProblemKind kind = ProblemKind::function;
  std::vector<Interval> domain;
  std::size_t n = 0;
  std::size_t n_times = 0;
  double t0 = 0.0;
  double t1 = 1.0;
  bool x0_low_exclusive = false;
  std::string target;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// A reproducible training recipe. Stages run in order; every stage after
/// the first continues from the previous weights and mask.
struct CasePreset {
  std::string id;
  DatasetSpec data;
  NetworkArch arch;
  std::vector<TrainConfig> stages;
  /// Domain used for field/function error reports (first input only).
  Interval eval_domain;

  friend bool operator==(const CasePreset&, const CasePreset&) = default;
};

const std::vector<std::string>& dataset_ids();
const std::vector<std::string>& preset_ids();

DatasetSpec dataset_spec(const std::string& id);
CasePreset preset(const std::string& id);

/// Analytic target of a function case, or the true field of an ODE case.
double target_value(const std::string& dataset_id, std::span<const double> x);
std::function<double(double)> ode_field(const std::string& dataset_id);

SampleSet make_samples(const DatasetSpec& spec, Rng& rng);
TrajectoryDataset make_trajectories(const DatasetSpec& spec, Rng& rng);

/// 4 * int_0^{pi/2} sqrt(a^2 cos^2 + sin^2) with composite Simpson.
double ellipse_perimeter(double a, int n_quad = 4096);
double ramanujan_perimeter(double a, double b);
// Straight line through (low, P(low)) and (high, P(high)).
Expr ellipse_interpolation(double low, double high);

/// Reference closed forms with fixed coefficients.
const std::vector<std::string>& reference_formula_ids();
Expr reference_formula(const std::string& id);

/// Mean of (f - g)^2 over n uniform points spanning [low, high].
double grid_mse(const std::function<double(double)>& f, const std::function<double(double)>& g, double low,
                double high, std::size_t n = 10000);
/// grid_mse(f, g) divided by the grid mean of f^2.
double relative_grid_mse(const std::function<double(double)>& f, const std::function<double(double)>& g,
                         double low, double high, std::size_t n = 10000);

/// Runs every stage of the preset on one seed. Histories are concatenated
/// with continuing epoch numbers; final_mse is the last stage's.
TrainReport train_preset(const CasePreset& preset, NetworkSpec& spec, const SampleSet& data, std::uint64_t seed);
TrainReport train_preset(const CasePreset& preset, NetworkSpec& spec, const TrajectoryDataset& data,
                         std::uint64_t seed);

}  // namespace nsindy
