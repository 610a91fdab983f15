#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsindy/cases.hpp"
#include "nsindy/network.hpp"
#include "nsindy/odedisc.hpp"
#include "nsindy/params.hpp"
#include "nsindy/training.hpp"

namespace nsindy {

inline constexpr int kCheckpointVersion = 1;

/// Malformed input. what() carries the file, line or field involved.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  int version = kCheckpointVersion;
  NetworkArch arch;
  FlatParams params;
  std::uint64_t seed = 0;
  TrainConfig config;
  int epoch = 0;
  std::string preset;  // empty when trained from explicit flags
  std::string data_case;  // dataset id of the target, if known

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint make_checkpoint(const NetworkSpec& spec, const FlatParams& params, std::uint64_t seed,
                           const TrainConfig& config, int epoch);
/// Network with the checkpoint's weights and mask.
NetworkSpec restore_network(const Checkpoint& checkpoint);

std::string checkpoint_to_json(const Checkpoint& checkpoint);
/// Unknown fields are reported through `warnings` (when given) and ignored.
Checkpoint checkpoint_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string preset_to_json(const CasePreset& preset);
CasePreset preset_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);

/// Header x1,...,xn,y; 17 significant digits.
void write_samples(const std::filesystem::path& path, const SampleSet& samples);
SampleSet read_samples(const std::filesystem::path& path);

/// Header trajectory,t,x; one row per sample.
void write_trajectories(const std::filesystem::path& path, const TrajectoryDataset& data);
TrajectoryDataset read_trajectories(const std::filesystem::path& path);

/// Header epoch,mse,lasso,lambda,active,event.
void write_report(const std::filesystem::path& path, const TrainReport& report);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nsindy
