#pragma once

#include <filesystem>

#include "cmcnn/model.hpp"

namespace cmcnn {

// Model checkpoint container, version 1 (little-endian binary):
//   magic   "CMCNNCK\0"                                    8 bytes
//   u32     format version (1)
//   i32 x7  n_conv_layers, reference_layers, base_channels,
//           num_classes, input_channels, input_height, input_width
//   u32     genome length, then one byte per gene
//   u64     parameter count
//   f32[]   parameters in canonical order (per block weight then bias,
//           then head weight and bias; weights row-major)

void saveCheckpoint(const Model<float>& model,
                    const std::filesystem::path& file);

Model<float> loadCheckpoint(const std::filesystem::path& file);

}  // namespace cmcnn
