#include "cmcnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace cmcnn {

namespace {

constexpr int kCifarClasses = 10;
constexpr Index kCifarSide = 32;
constexpr Index kCifarChannels = 3;

Dataset recordsToDataset(const std::vector<RawCifarRecord>& records) {
  Dataset set;
  set.num_classes = kCifarClasses;
  set.images = Tensor4<float>(static_cast<Index>(records.size()),
                              kCifarChannels, kCifarSide, kCifarSide);
  set.labels.reserve(records.size());
  float* out = set.images.data.data();
  for (const RawCifarRecord& rec : records) {
    set.labels.push_back(rec.label);
    for (const std::uint8_t byte : rec.pixels) {
      *out++ = static_cast<float>(byte) / 255.0f;
    }
  }
  return set;
}

}  // namespace

std::vector<RawCifarRecord> readCifar10Batch(
    const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw FormatError("cifar10: cannot open " + file.string());
  }
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  if (bytes != kCifarBatchBytes) {
    throw FormatError("cifar10: " + file.string() + " has " +
                      std::to_string(bytes) + " bytes, expected " +
                      std::to_string(kCifarBatchBytes));
  }
  in.seekg(0, std::ios::beg);

  std::vector<RawCifarRecord> records(kCifarRecordsPerBatch);
  for (std::size_t i = 0; i < records.size(); ++i) {
    RawCifarRecord& rec = records[i];
    in.read(reinterpret_cast<char*>(&rec.label), 1);
    in.read(reinterpret_cast<char*>(rec.pixels.data()),
            static_cast<std::streamsize>(rec.pixels.size()));
    if (!in) {
      throw FormatError("cifar10: short read in " + file.string());
    }
    if (rec.label > 9) {
      throw CorruptionError("cifar10: record " + std::to_string(i) + " of " +
                            file.string() + " has label byte " +
                            std::to_string(rec.label));
    }
  }
  return records;
}

void writeCifar10Batch(const std::filesystem::path& file,
                       const std::vector<RawCifarRecord>& records) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cifar10: cannot write " + file.string());
  }
  for (const RawCifarRecord& rec : records) {
    out.write(reinterpret_cast<const char*>(&rec.label), 1);
    out.write(reinterpret_cast<const char*>(rec.pixels.data()),
              static_cast<std::streamsize>(rec.pixels.size()));
  }
  if (!out) {
    throw FormatError("cifar10: write failed for " + file.string());
  }
}

Cifar10 loadCifar10(const std::filesystem::path& dir) {
  std::vector<RawCifarRecord> trainRecords;
  trainRecords.reserve(5 * kCifarRecordsPerBatch);
  for (int batch = 1; batch <= 5; ++batch) {
    const auto file = dir / ("data_batch_" + std::to_string(batch) + ".bin");
    const auto records = readCifar10Batch(file);
    trainRecords.insert(trainRecords.end(), records.begin(), records.end());
  }
  const auto testRecords = readCifar10Batch(dir / "test_batch.bin");

  Cifar10 out;
  out.train = recordsToDataset(trainRecords);
  out.test = recordsToDataset(testRecords);
  return out;
}

std::vector<RawCifarRecord> toRawRecords(const Dataset& set) {
  set.validate();
  if (set.images.channels != kCifarChannels ||
      set.images.height != kCifarSide || set.images.width != kCifarSide ||
      set.num_classes != kCifarClasses) {
    throw FormatError("toRawRecords: dataset is not CIFAR-10 shaped");
  }
  std::vector<RawCifarRecord> records(static_cast<std::size_t>(set.count()));
  const float* in = set.images.data.data();
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].label = static_cast<std::uint8_t>(set.labels[i]);
    for (auto& byte : records[i].pixels) {
      const float clamped = std::clamp(*in++, 0.0f, 1.0f);
      byte = static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
    }
  }
  return records;
}

}  // namespace cmcnn
