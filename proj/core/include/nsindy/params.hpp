#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nsindy {

/// Contiguous slice of the flat parameter vector owned by one tensor.
struct ParamBlock {
  std::string name;  // e.g. "linear_1.weight"
  std::size_t offset = 0;
  std::size_t count = 0;

  friend bool operator==(const ParamBlock&, const ParamBlock&) = default;
};

using ParamLayout = std::vector<ParamBlock>;

/// Flat trainable parameter vector with its binary prune mask.
/// mask[i] == 1 means coordinate i is active; masked coordinates hold 0.
struct FlatParams {
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  ParamLayout layout;

  std::size_t size() const noexcept { return values.size(); }
  bool active(std::size_t i) const { return mask[i] != 0; }
  std::size_t active_count() const;

  /// Zero every masked coordinate.
  void apply_mask();

  friend bool operator==(const FlatParams&, const FlatParams&) = default;
};

}  // namespace nsindy
