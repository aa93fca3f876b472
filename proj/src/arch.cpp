#include "cmcnn/arch.hpp"

#include <algorithm>

#include "cmcnn/errors.hpp"

namespace cmcnn {

void ArchSpec::validate() const {
  if (n_conv_layers < 1) {
    throw ConfigError("ArchSpec: n_conv_layers must be >= 1");
  }
  if (reference_layers < 1 || n_conv_layers > reference_layers) {
    throw ConfigError("ArchSpec: need 1 <= n_conv_layers <= reference_layers");
  }
  if (base_channels < 1 || num_classes < 2 || input_channels < 1 ||
      input_height < 1 || input_width < 1) {
    throw ConfigError("ArchSpec: non-positive dimension");
  }
}

std::string ArchSpec::modelId(bool ga) const {
  std::string id = (n_conv_layers == reference_layers ? "M" : "CM") +
                   std::to_string(n_conv_layers);
  if (ga) {
    id += "_GA";
  }
  return id;
}

NetworkPlan planNetwork(const ArchSpec& arch) {
  arch.validate();
  NetworkPlan plan;
  int in = arch.input_channels;
  int width = arch.base_channels;
  for (int i = 1; i <= arch.n_conv_layers; ++i) {
    const bool pool = (i % 2 == 0);
    plan.blocks.push_back({in, width, pool});
    in = width;
    if (pool) {
      width = std::min(2 * width, kChannelCap);
    }
  }
  plan.head_channels = in;
  return plan;
}

std::int64_t parameterCount(const ArchSpec& arch) {
  const NetworkPlan plan = planNetwork(arch);
  std::int64_t count = 0;
  for (const ConvBlockPlan& b : plan.blocks) {
    count += std::int64_t(b.in_channels) * kKernelSize * kKernelSize *
                 b.out_channels +
             b.out_channels;
  }
  count += std::int64_t(plan.head_channels) * arch.num_classes +
           arch.num_classes;
  return count;
}

std::int64_t parameterBytes(const ArchSpec& arch) {
  return parameterCount(arch) * kBytesPerParameter;
}

}  // namespace cmcnn
