#include "cmcnn/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace cmcnn {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'M', 'C', 'N', 'N', 'C', 'K', 0};
constexpr std::uint32_t kVersion = 1;

template <class T>
void writePod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T readPod(std::ifstream& in, const std::filesystem::path& file) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw FormatError("checkpoint: short read in " + file.string());
  }
  return value;
}

}  // namespace

void saveCheckpoint(const Model<float>& model,
                    const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("checkpoint: cannot write " + file.string());
  }
  out.write(kMagic.data(), kMagic.size());
  writePod(out, kVersion);
  const ArchSpec& a = model.arch;
  for (const std::int32_t v :
       {a.n_conv_layers, a.reference_layers, a.base_channels, a.num_classes,
        a.input_channels, a.input_height, a.input_width}) {
    writePod(out, v);
  }
  writePod(out, static_cast<std::uint32_t>(model.genome.size()));
  for (const Activation gene : model.genome) {
    writePod(out, static_cast<std::uint8_t>(gene));
  }
  writePod(out, static_cast<std::uint64_t>(model.paramCount()));
  model.visitParams([&](const float* p, Eigen::Index n) {
    out.write(reinterpret_cast<const char*>(p),
              static_cast<std::streamsize>(n * sizeof(float)));
  });
  if (!out) {
    throw FormatError("checkpoint: write failed for " + file.string());
  }
}

Model<float> loadCheckpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw FormatError("checkpoint: cannot open " + file.string());
  }
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw FormatError("checkpoint: bad magic in " + file.string());
  }
  const auto version = readPod<std::uint32_t>(in, file);
  if (version != kVersion) {
    throw FormatError("checkpoint: unsupported version " +
                      std::to_string(version) + " in " + file.string());
  }

  ArchSpec arch;
  arch.n_conv_layers = readPod<std::int32_t>(in, file);
  arch.reference_layers = readPod<std::int32_t>(in, file);
  arch.base_channels = readPod<std::int32_t>(in, file);
  arch.num_classes = readPod<std::int32_t>(in, file);
  arch.input_channels = readPod<std::int32_t>(in, file);
  arch.input_height = readPod<std::int32_t>(in, file);
  arch.input_width = readPod<std::int32_t>(in, file);
  arch.validate();

  const auto genomeLen = readPod<std::uint32_t>(in, file);
  if (genomeLen != static_cast<std::uint32_t>(arch.n_conv_layers)) {
    throw FormatError("checkpoint: genome length disagrees with the "
                      "architecture in " +
                      file.string());
  }
  std::vector<Activation> genes(genomeLen);
  for (auto& gene : genes) {
    const auto byte = readPod<std::uint8_t>(in, file);
    if (byte >= kAllActivations.size()) {
      throw FormatError("checkpoint: invalid gene byte in " + file.string());
    }
    gene = static_cast<Activation>(byte);
  }

  // Seed is irrelevant; every parameter is overwritten below.
  Model<float> model = buildModel<float>(arch, Genome(std::move(genes)), 0);

  const auto paramCount = readPod<std::uint64_t>(in, file);
  if (paramCount != static_cast<std::uint64_t>(model.paramCount())) {
    throw FormatError("checkpoint: parameter count mismatch in " +
                      file.string());
  }
  model.visitParams([&](float* p, Eigen::Index n) {
    in.read(reinterpret_cast<char*>(p),
            static_cast<std::streamsize>(n * sizeof(float)));
  });
  if (!in) {
    throw FormatError("checkpoint: short parameter block in " + file.string());
  }
  char extra = 0;
  if (in.read(&extra, 1)) {
    throw FormatError("checkpoint: trailing bytes in " + file.string());
  }
  return model;
}

}  // namespace cmcnn
