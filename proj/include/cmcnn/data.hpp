#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "cmcnn/errors.hpp"
#include "cmcnn/rng.hpp"
#include "cmcnn/tensor.hpp"

namespace cmcnn {

/// Images plus integer class labels. Loaded pixel data is scaled to [0,1];
/// synthetic generators may produce unbounded reals.
template <class Scalar>
struct LabeledImageSet {
  Tensor4<Scalar> images;  // (count, C, H, W)
  std::vector<int> labels;
  int num_classes = 0;

  Index count() const { return images.batch; }

  void validate() const {
    if (images.batch != static_cast<Index>(labels.size())) {
      throw DataError("LabeledImageSet: image/label count mismatch");
    }
    if (num_classes < 1) {
      throw DataError("LabeledImageSet: num_classes must be >= 1");
    }
    for (const int label : labels) {
      if (label < 0 || label >= num_classes) {
        throw LabelError("LabeledImageSet: label out of range");
      }
    }
  }
};

using Dataset = LabeledImageSet<float>;

/// Contiguous sub-range [from, from+count) in the set's canonical order.
template <class Scalar>
LabeledImageSet<Scalar> slice(const LabeledImageSet<Scalar>& set, Index from,
                              Index count) {
  if (from < 0 || count < 1 || from + count > set.count()) {
    throw PartitionError("slice: range [" + std::to_string(from) + ", " +
                         std::to_string(from + count) + ") outside dataset of " +
                         std::to_string(set.count()));
  }
  LabeledImageSet<Scalar> out;
  out.images = Tensor4<Scalar>(count, set.images.channels, set.images.height,
                               set.images.width);
  const Index perImage =
      set.images.channels * set.images.height * set.images.width;
  out.images.data = set.images.data.segment(from * perImage, count * perImage);
  out.labels.assign(set.labels.begin() + from, set.labels.begin() + from + count);
  out.num_classes = set.num_classes;
  return out;
}

/// First partition method: prefixes D[1..n_train] and T[1..n_test].
template <class Scalar>
std::pair<LabeledImageSet<Scalar>, LabeledImageSet<Scalar>> partitionFirst(
    const LabeledImageSet<Scalar>& train, const LabeledImageSet<Scalar>& test,
    Index nTrain, Index nTest) {
  return {slice(train, 0, nTrain), slice(test, 0, nTest)};
}

/// Second partition method: suffixes ending at D[50000] and T[10000].
template <class Scalar>
std::pair<LabeledImageSet<Scalar>, LabeledImageSet<Scalar>> partitionSecond(
    const LabeledImageSet<Scalar>& train, const LabeledImageSet<Scalar>& test,
    Index kTrain, Index kTest) {
  if (kTrain < 1 || kTrain > train.count() || kTest < 1 ||
      kTest > test.count()) {
    throw PartitionError("partitionSecond: counts out of range");
  }
  return {slice(train, train.count() - kTrain, kTrain),
          slice(test, test.count() - kTest, kTest)};
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary format: 10000 records per batch file, 3073 bytes per
// record = 1 label byte + 1024 R + 1024 G + 1024 B bytes (row-major 32x32).
// ---------------------------------------------------------------------------

inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr std::size_t kCifarRecordsPerBatch = 10000;
inline constexpr std::size_t kCifarBatchBytes =
    kCifarRecordBytes * kCifarRecordsPerBatch;  // 30,730,000

struct RawCifarRecord {
  std::uint8_t label = 0;
  std::array<std::uint8_t, 3072> pixels{};  // CHW planes, R then G then B
};

/// Reads one batch file, enforcing the exact byte count and label range.
std::vector<RawCifarRecord> readCifar10Batch(const std::filesystem::path& file);

/// Writes records in the wire format (any record count; the canonical batch
/// size is 10000).
void writeCifar10Batch(const std::filesystem::path& file,
                       const std::vector<RawCifarRecord>& records);

struct Cifar10 {
  Dataset train;  // batches 1..5 concatenated in file order: D[1..50000]
  Dataset test;   // T[1..10000]
};

/// Loads data_batch_1..5.bin and test_batch.bin from `dir`, scaling pixels
/// by 1/255. Fails closed: any missing or malformed file aborts the load.
Cifar10 loadCifar10(const std::filesystem::path& dir);

/// Quantizes a dataset to the wire format (pixels clamped to [0,1] then
/// rounded to bytes). Used to export synthetic data for loader tests.
std::vector<RawCifarRecord> toRawRecords(const Dataset& set);

/// Gaussian class blobs: image = separation * mean_c + noise, with mean_c a
/// fixed standard-normal pattern per class. Deterministic per seed.
template <class Scalar>
LabeledImageSet<Scalar> syntheticBlobs(int numClasses, Index samplesPerClass,
                                       Index channels, Index height,
                                       Index width, double separation,
                                       std::uint64_t seed) {
  if (numClasses < 2 || samplesPerClass < 1) {
    throw ConfigError("syntheticBlobs: need >= 2 classes and >= 1 sample each");
  }
  if (channels < 1 || height < 1 || width < 1) {
    throw ConfigError("syntheticBlobs: degenerate image shape");
  }
  if (!(separation > 0.0)) {
    throw ConfigError("syntheticBlobs: separation must be positive");
  }
  const Index perImage = channels * height * width;
  LabeledImageSet<Scalar> out;
  out.images = Tensor4<Scalar>(Index(numClasses) * samplesPerClass, channels,
                               height, width);
  out.num_classes = numClasses;
  std::vector<double> mean(static_cast<std::size_t>(perImage));
  Index at = 0;
  for (int c = 0; c < numClasses; ++c) {
    RngStream meanRng(deriveSeed(seed, "class-mean", std::uint64_t(c)));
    for (auto& v : mean) {
      v = meanRng.nextNormal();
    }
    for (Index s = 0; s < samplesPerClass; ++s) {
      RngStream noise(deriveSeed(seed, "sample", std::uint64_t(c),
                                 std::uint64_t(s)));
      Scalar* img = out.images.data.data() + at * perImage;
      for (Index i = 0; i < perImage; ++i) {
        img[i] = static_cast<Scalar>(
            separation * mean[static_cast<std::size_t>(i)] +
            noise.nextNormal());
      }
      out.labels.push_back(c);
      ++at;
    }
  }
  return out;
}

}  // namespace cmcnn
