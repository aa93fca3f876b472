#pragma once

#include <Eigen/Core>

#include "cmcnn/errors.hpp"

namespace cmcnn {

using Eigen::Index;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense feature storage; rows are contiguous so per-channel copies and
/// im2col gathers stay cache-friendly.
template <class Scalar>
using MatrixRM =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A batch of feature maps in NCHW order, stored flat.
template <class Scalar>
struct Tensor4 {
  VectorX<Scalar> data;
  Index batch = 0;
  Index channels = 0;
  Index height = 0;
  Index width = 0;

  Tensor4() = default;

  Tensor4(Index b, Index c, Index h, Index w)
      : data(VectorX<Scalar>::Zero(b * c * h * w)),
        batch(b),
        channels(c),
        height(h),
        width(w) {
    if (b < 0 || c <= 0 || h <= 0 || w <= 0) {
      throw ShapeError("Tensor4: non-positive dimension");
    }
  }

  Index size() const { return batch * channels * height * width; }

  Scalar& operator()(Index b, Index c, Index y, Index x) {
    return data[((b * channels + c) * height + y) * width + x];
  }
  Scalar operator()(Index b, Index c, Index y, Index x) const {
    return data[((b * channels + c) * height + y) * width + x];
  }

  /// Pointer to the contiguous (height x width) plane of one channel.
  const Scalar* plane(Index b, Index c) const {
    return data.data() + (b * channels + c) * height * width;
  }
  Scalar* plane(Index b, Index c) {
    return data.data() + (b * channels + c) * height * width;
  }

  bool allFinite() const { return data.allFinite(); }

  template <class Other>
  Tensor4<Other> cast() const {
    Tensor4<Other> out(batch, channels, height, width);
    out.data = data.template cast<Other>();
    return out;
  }
};

}  // namespace cmcnn
