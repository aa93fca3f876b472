#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmcnn {

inline constexpr int kKernelSize = 3;
inline constexpr int kChannelCap = 128;
inline constexpr int kBytesPerParameter = 4;  // parameters are stored as f32

/// Description of one compressed architecture CM^n: n conv blocks of
/// [3x3 conv, stride 1, same padding, activation], a 2x2 max-pool after
/// every second block, channels doubling after each pool (capped), then
/// global average pooling and a dense softmax head.
struct ArchSpec {
  int n_conv_layers = 4;    // the n in CM^n
  int reference_layers = 10;  // the m the size ratio is taken against
  int base_channels = 16;
  int num_classes = 10;
  int input_channels = 3;
  int input_height = 32;
  int input_width = 32;

  void validate() const;

  /// "CM4" / "M10", with "_GA" appended for GA-selected variants.
  std::string modelId(bool ga) const;

  bool operator==(const ArchSpec&) const = default;
};

struct ConvBlockPlan {
  int in_channels = 0;
  int out_channels = 0;
  bool pool_after = false;
};

struct NetworkPlan {
  std::vector<ConvBlockPlan> blocks;
  int head_channels = 0;  // channels entering the global average pool
};

NetworkPlan planNetwork(const ArchSpec& arch);

/// Total learnable parameters (conv kernels + biases, dense + bias).
std::int64_t parameterCount(const ArchSpec& arch);

/// parameterCount * 4 bytes (32-bit storage).
std::int64_t parameterBytes(const ArchSpec& arch);

}  // namespace cmcnn
