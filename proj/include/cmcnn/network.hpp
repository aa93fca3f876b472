#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "cmcnn/data.hpp"
#include "cmcnn/model.hpp"

namespace cmcnn {

struct TrainConfig {
  int epochs = 15;
  int batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1 || batch_size < 1) {
      throw ConfigError("TrainConfig: epochs and batch_size must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
      throw ConfigError("TrainConfig: learning_rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
      throw ConfigError("TrainConfig: momentum must be in [0, 1)");
    }
  }
};

template <class Scalar>
struct Gradients {
  std::vector<MatrixRM<Scalar>> block_weight;
  std::vector<VectorX<Scalar>> block_bias;
  MatrixRM<Scalar> head_weight;
  VectorX<Scalar> head_bias;

  static Gradients zerosLike(const Model<Scalar>& model) {
    Gradients g;
    for (const auto& b : model.blocks) {
      g.block_weight.push_back(
          MatrixRM<Scalar>::Zero(b.weight.rows(), b.weight.cols()));
      g.block_bias.push_back(VectorX<Scalar>::Zero(b.bias.size()));
    }
    g.head_weight = MatrixRM<Scalar>::Zero(model.head.weight.rows(),
                                           model.head.weight.cols());
    g.head_bias = VectorX<Scalar>::Zero(model.head.bias.size());
    return g;
  }

  bool allFinite() const {
    for (const auto& w : block_weight) {
      if (!w.allFinite()) return false;
    }
    for (const auto& b : block_bias) {
      if (!b.allFinite()) return false;
    }
    return head_weight.allFinite() && head_bias.allFinite();
  }
};

namespace detail {

// Feature maps are (channels, batch*H*W) row-major matrices; the column of
// pixel (b, y, x) is (b*H + y)*W + x.

using ArgMatrix =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// im2col for a 3x3 kernel with stride 1 and same (zero) padding.
/// Output row c*9 + dy*3 + dx holds input channel c shifted by (dy-1, dx-1);
/// out-of-image positions stay zero.
template <class Scalar>
MatrixRM<Scalar> im2col(const MatrixRM<Scalar>& x, Index batch, Index h,
                        Index w) {
  const Index channels = x.rows();
  MatrixRM<Scalar> patches = MatrixRM<Scalar>::Zero(channels * 9, x.cols());
  for (Index c = 0; c < channels; ++c) {
    const Scalar* src = x.data() + c * x.cols();
    for (Index dy = 0; dy < 3; ++dy) {
      for (Index dx = 0; dx < 3; ++dx) {
        Scalar* dst = patches.data() + (c * 9 + dy * 3 + dx) * patches.cols();
        const Index xStart = std::max<Index>(0, 1 - dx);
        const Index xEnd = std::min<Index>(w, w + 1 - dx);
        if (xEnd <= xStart) continue;
        for (Index b = 0; b < batch; ++b) {
          for (Index y = 0; y < h; ++y) {
            const Index sy = y + dy - 1;
            if (sy < 0 || sy >= h) continue;
            const Index dstOff = (b * h + y) * w + xStart;
            const Index srcOff = (b * h + sy) * w + (xStart + dx - 1);
            std::copy(src + srcOff, src + srcOff + (xEnd - xStart),
                      dst + dstOff);
          }
        }
      }
    }
  }
  return patches;
}

/// Adjoint of im2col: scatter-adds patch gradients back onto the input map.
template <class Scalar>
MatrixRM<Scalar> col2im(const MatrixRM<Scalar>& dPatches, Index channels,
                        Index batch, Index h, Index w) {
  MatrixRM<Scalar> dInput = MatrixRM<Scalar>::Zero(channels, dPatches.cols());
  for (Index c = 0; c < channels; ++c) {
    Scalar* dst = dInput.data() + c * dInput.cols();
    for (Index dy = 0; dy < 3; ++dy) {
      for (Index dx = 0; dx < 3; ++dx) {
        const Scalar* src =
            dPatches.data() + (c * 9 + dy * 3 + dx) * dPatches.cols();
        const Index xStart = std::max<Index>(0, 1 - dx);
        const Index xEnd = std::min<Index>(w, w + 1 - dx);
        if (xEnd <= xStart) continue;
        for (Index b = 0; b < batch; ++b) {
          for (Index y = 0; y < h; ++y) {
            const Index sy = y + dy - 1;
            if (sy < 0 || sy >= h) continue;
            const Index patchOff = (b * h + y) * w + xStart;
            const Index imageOff = (b * h + sy) * w + (xStart + dx - 1);
            for (Index t = 0; t < xEnd - xStart; ++t) {
              dst[imageOff + t] += src[patchOff + t];
            }
          }
        }
      }
    }
  }
  return dInput;
}

/// 2x2 max pool, stride 2, ceil mode (edge windows clip; a 1-pixel side is
/// passed through). Records the winning source column for backprop.
template <class Scalar>
void maxPool(const MatrixRM<Scalar>& x, Index batch, Index h, Index w,
             MatrixRM<Scalar>& out, ArgMatrix& argCol, Index& ho, Index& wo) {
  ho = (h + 1) / 2;
  wo = (w + 1) / 2;
  const Index channels = x.rows();
  out.resize(channels, batch * ho * wo);
  argCol.resize(channels, batch * ho * wo);
  for (Index c = 0; c < channels; ++c) {
    const Scalar* src = x.data() + c * x.cols();
    Scalar* dst = out.data() + c * out.cols();
    std::int32_t* arg = argCol.data() + c * argCol.cols();
    for (Index b = 0; b < batch; ++b) {
      for (Index oy = 0; oy < ho; ++oy) {
        const Index y1 = std::min<Index>(2 * oy + 2, h);
        for (Index ox = 0; ox < wo; ++ox) {
          const Index x1 = std::min<Index>(2 * ox + 2, w);
          Index bestCol = (b * h + 2 * oy) * w + 2 * ox;
          Scalar best = src[bestCol];
          for (Index y = 2 * oy; y < y1; ++y) {
            for (Index xx = 2 * ox; xx < x1; ++xx) {
              const Index col = (b * h + y) * w + xx;
              if (src[col] > best) {
                best = src[col];
                bestCol = col;
              }
            }
          }
          const Index outCol = (b * ho + oy) * wo + ox;
          dst[outCol] = best;
          arg[outCol] = static_cast<std::int32_t>(bestCol);
        }
      }
    }
  }
}

template <class Scalar>
MatrixRM<Scalar> maxPoolBackward(const MatrixRM<Scalar>& dOut,
                                 const ArgMatrix& argCol, Index inCols) {
  MatrixRM<Scalar> dIn = MatrixRM<Scalar>::Zero(argCol.rows(), inCols);
  for (Index c = 0; c < argCol.rows(); ++c) {
    const Scalar* src = dOut.data() + c * dOut.cols();
    const std::int32_t* arg = argCol.data() + c * argCol.cols();
    Scalar* dst = dIn.data() + c * inCols;
    for (Index j = 0; j < dOut.cols(); ++j) {
      dst[arg[j]] += src[j];
    }
  }
  return dIn;
}

/// Numerically stable column-wise softmax.
template <class Scalar>
MatrixRM<Scalar> softmaxColumns(const MatrixRM<Scalar>& logits) {
  MatrixRM<Scalar> probs = logits;
  for (Index j = 0; j < probs.cols(); ++j) {
    auto col = probs.col(j);
    const Scalar peak = col.maxCoeff();
    col = (col.array() - peak).exp();
    col /= col.sum();
  }
  return probs;
}

template <class Scalar>
struct ForwardTrace {
  std::vector<Index> inChannels;          // channels entering each block
  std::vector<MatrixRM<Scalar>> patches;  // im2col of each block input
  std::vector<MatrixRM<Scalar>> preAct;   // conv output before activation
  std::vector<ArgMatrix> poolArg;         // per block; empty if no pool
  std::vector<std::pair<Index, Index>> dims;  // (h, w) entering each block
  std::pair<Index, Index> outDims;            // (h, w) after last block
  MatrixRM<Scalar> pooled;                // GAP output (channels, batch)
  MatrixRM<Scalar> probs;                 // (classes, batch)
};

/// Runs the network on a feature matrix; fills `trace` when non-null.
template <class Scalar>
MatrixRM<Scalar> forwardFeature(const Model<Scalar>& model,
                                MatrixRM<Scalar> x, Index batch, Index h,
                                Index w, ForwardTrace<Scalar>* trace) {
  for (const ConvBlock<Scalar>& block : model.blocks) {
    if (trace) {
      trace->dims.emplace_back(h, w);
      trace->inChannels.push_back(x.rows());
    }
    MatrixRM<Scalar> patches = im2col(x, batch, h, w);
    MatrixRM<Scalar> z = block.weight * patches;
    z.colwise() += block.bias;
    const Activation f = block.activation;
    MatrixRM<Scalar> a =
        z.unaryExpr([f](Scalar v) { return activationValue(f, v); });
    if (trace) {
      trace->patches.push_back(std::move(patches));
      trace->preAct.push_back(std::move(z));
    }
    if (block.pool_after) {
      MatrixRM<Scalar> pooled;
      ArgMatrix arg;
      Index ho = 0, wo = 0;
      maxPool(a, batch, h, w, pooled, arg, ho, wo);
      if (trace) {
        trace->poolArg.push_back(std::move(arg));
      }
      x = std::move(pooled);
      h = ho;
      w = wo;
    } else {
      if (trace) {
        trace->poolArg.emplace_back();
      }
      x = std::move(a);
    }
  }

  // Global average pool over the remaining spatial extent.
  const Index hw = h * w;
  MatrixRM<Scalar> pooled(x.rows(), batch);
  for (Index c = 0; c < x.rows(); ++c) {
    const Scalar* row = x.data() + c * x.cols();
    for (Index b = 0; b < batch; ++b) {
      Scalar sum = 0;
      for (Index i = 0; i < hw; ++i) {
        sum += row[b * hw + i];
      }
      pooled(c, b) = sum / static_cast<Scalar>(hw);
    }
  }

  MatrixRM<Scalar> logits = model.head.weight * pooled;
  logits.colwise() += model.head.bias;
  MatrixRM<Scalar> probs = softmaxColumns(logits);
  if (trace) {
    trace->outDims = {h, w};
    trace->pooled = std::move(pooled);
    trace->probs = probs;
  }
  return probs;
}

/// Gathers dataset samples idx[from..to) into the feature layout.
template <class Scalar>
MatrixRM<Scalar> gatherBatch(const LabeledImageSet<Scalar>& data,
                             const std::vector<Index>& idx, std::size_t from,
                             std::size_t to) {
  const Index channels = data.images.channels;
  const Index hw = data.images.height * data.images.width;
  const auto nb = static_cast<Index>(to - from);
  MatrixRM<Scalar> x(channels, nb * hw);
  for (Index b = 0; b < nb; ++b) {
    const Index sample = idx[from + static_cast<std::size_t>(b)];
    for (Index c = 0; c < channels; ++c) {
      const Scalar* src = data.images.plane(sample, c);
      std::copy(src, src + hw, x.data() + c * x.cols() + b * hw);
    }
  }
  return x;
}

template <class Scalar>
MatrixRM<Scalar> tensorToFeature(const Tensor4<Scalar>& batch) {
  const Index hw = batch.height * batch.width;
  MatrixRM<Scalar> x(batch.channels, batch.batch * hw);
  for (Index b = 0; b < batch.batch; ++b) {
    for (Index c = 0; c < batch.channels; ++c) {
      const Scalar* src = batch.plane(b, c);
      std::copy(src, src + hw, x.data() + c * x.cols() + b * hw);
    }
  }
  return x;
}

template <class Scalar>
void checkBatchShape(const Model<Scalar>& model, Index channels, Index h,
                     Index w) {
  if (channels != model.arch.input_channels ||
      h != model.arch.input_height || w != model.arch.input_width) {
    throw ShapeError("batch shape does not match the model's input shape");
  }
}

/// Mean cross-entropy; also fills dLoss/dLogits = (p - onehot) / batch.
template <class Scalar>
Scalar crossEntropyWithGrad(const MatrixRM<Scalar>& probs,
                            const std::vector<int>& labels,
                            MatrixRM<Scalar>& dLogits) {
  const Index batch = probs.cols();
  dLogits = probs;
  Scalar loss = 0;
  for (Index b = 0; b < batch; ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    const Scalar p =
        std::max(probs(label, b), std::numeric_limits<Scalar>::min());
    loss -= std::log(p);
    dLogits(label, b) -= Scalar(1);
  }
  dLogits /= static_cast<Scalar>(batch);
  return loss / static_cast<Scalar>(batch);
}

/// Full backward pass over a gathered feature batch.
template <class Scalar>
Scalar backwardFeature(const Model<Scalar>& model, MatrixRM<Scalar> x,
                       Index batch, Index h, Index w,
                       const std::vector<int>& labels,
                       Gradients<Scalar>& grads) {
  ForwardTrace<Scalar> trace;
  forwardFeature(model, std::move(x), batch, h, w, &trace);

  MatrixRM<Scalar> dLogits;
  const Scalar loss = crossEntropyWithGrad(trace.probs, labels, dLogits);

  grads.head_weight.noalias() = dLogits * trace.pooled.transpose();
  grads.head_bias = dLogits.rowwise().sum();
  MatrixRM<Scalar> dPooled = model.head.weight.transpose() * dLogits;

  // Spread the GAP gradient uniformly over the final spatial extent.
  const Index hwOut = trace.outDims.first * trace.outDims.second;
  MatrixRM<Scalar> dY(dPooled.rows(), batch * hwOut);
  for (Index c = 0; c < dPooled.rows(); ++c) {
    Scalar* row = dY.data() + c * dY.cols();
    for (Index b = 0; b < batch; ++b) {
      const Scalar v = dPooled(c, b) / static_cast<Scalar>(hwOut);
      std::fill(row + b * hwOut, row + (b + 1) * hwOut, v);
    }
  }

  for (int i = static_cast<int>(model.blocks.size()) - 1; i >= 0; --i) {
    const auto bi = static_cast<std::size_t>(i);
    const ConvBlock<Scalar>& block = model.blocks[bi];
    const auto [bh, bw] = trace.dims[bi];
    MatrixRM<Scalar> dA = block.pool_after
                              ? maxPoolBackward(dY, trace.poolArg[bi],
                                                batch * bh * bw)
                              : std::move(dY);
    const Activation f = block.activation;
    const MatrixRM<Scalar> slopes = trace.preAct[bi].unaryExpr(
        [f](Scalar v) { return activationSlope(f, v); });
    MatrixRM<Scalar> dZ = dA.cwiseProduct(slopes);
    grads.block_weight[bi].noalias() = dZ * trace.patches[bi].transpose();
    grads.block_bias[bi] = dZ.rowwise().sum();
    if (i > 0) {
      MatrixRM<Scalar> dPatches = block.weight.transpose() * dZ;
      dY = col2im(dPatches, trace.inChannels[bi], batch, bh, bw);
    }
  }
  return loss;
}

}  // namespace detail

/// Class probabilities, one row per sample; rows sum to 1.
template <class Scalar>
MatrixRM<Scalar> forward(const Model<Scalar>& model,
                         const Tensor4<Scalar>& batch) {
  detail::checkBatchShape(model, batch.channels, batch.height, batch.width);
  const MatrixRM<Scalar> probs = detail::forwardFeature<Scalar>(
      model, detail::tensorToFeature(batch), batch.batch, batch.height,
      batch.width, nullptr);
  if (!probs.allFinite()) {
    throw NumericError("forward: non-finite output");
  }
  return probs.transpose();
}

/// Gradients of the mean softmax cross-entropy over the batch.
template <class Scalar>
std::pair<Gradients<Scalar>, Scalar> backward(const Model<Scalar>& model,
                                              const Tensor4<Scalar>& batch,
                                              const std::vector<int>& labels) {
  detail::checkBatchShape(model, batch.channels, batch.height, batch.width);
  if (static_cast<Index>(labels.size()) != batch.batch) {
    throw LabelError("backward: label count != batch size");
  }
  for (const int label : labels) {
    if (label < 0 || label >= model.arch.num_classes) {
      throw LabelError("backward: label out of range");
    }
  }
  Gradients<Scalar> grads = Gradients<Scalar>::zerosLike(model);
  const Scalar loss = detail::backwardFeature<Scalar>(
      model, detail::tensorToFeature(batch), batch.batch, batch.height,
      batch.width, labels, grads);
  if (!std::isfinite(static_cast<double>(loss)) || !grads.allFinite()) {
    throw NumericError("backward: non-finite loss or gradient");
  }
  return {std::move(grads), loss};
}

/// SGD with momentum over shuffled mini-batches. Returns wall-clock seconds
/// (reported as T_train). Deterministic given (model, data, cfg.seed).
template <class Scalar>
double train(Model<Scalar>& model, const LabeledImageSet<Scalar>& data,
             const TrainConfig& cfg) {
  cfg.validate();
  if (data.count() == 0) {
    throw DataError("train: empty dataset");
  }
  data.validate();
  detail::checkBatchShape(model, data.images.channels, data.images.height,
                          data.images.width);
  if (data.num_classes != model.arch.num_classes) {
    throw LabelError("train: dataset classes != model classes");
  }

  const auto start = std::chrono::steady_clock::now();
  Gradients<Scalar> velocity = Gradients<Scalar>::zerosLike(model);
  Gradients<Scalar> grads = Gradients<Scalar>::zerosLike(model);
  std::vector<Index> order(static_cast<std::size_t>(data.count()));
  std::iota(order.begin(), order.end(), Index(0));

  const auto lr = static_cast<Scalar>(cfg.learning_rate);
  const auto mu = static_cast<Scalar>(cfg.momentum);
  const auto step = [&](auto& param, auto& vel, const auto& grad) {
    vel = mu * vel - lr * grad;
    param += vel;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RngStream shuffler(deriveSeed(cfg.seed, "epoch-shuffle",
                                  static_cast<std::uint64_t>(epoch)));
    shuffler.shuffle(order);
    for (std::size_t at = 0; at < order.size();
         at += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(
          order.size(), at + static_cast<std::size_t>(cfg.batch_size));
      std::vector<int> labels(end - at);
      for (std::size_t i = at; i < end; ++i) {
        labels[i - at] = data.labels[static_cast<std::size_t>(order[i])];
      }
      const Scalar loss = detail::backwardFeature<Scalar>(
          model, detail::gatherBatch(data, order, at, end),
          static_cast<Index>(end - at), data.images.height,
          data.images.width, labels, grads);
      if (!std::isfinite(static_cast<double>(loss))) {
        throw NumericError("train: non-finite loss");
      }
      for (std::size_t i = 0; i < model.blocks.size(); ++i) {
        step(model.blocks[i].weight, velocity.block_weight[i],
             grads.block_weight[i]);
        step(model.blocks[i].bias, velocity.block_bias[i],
             grads.block_bias[i]);
      }
      step(model.head.weight, velocity.head_weight, grads.head_weight);
      step(model.head.bias, velocity.head_bias, grads.head_bias);
    }
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

struct PredictResult {
  std::vector<int> labels;
  double seconds = 0.0;
};

/// Argmax class per sample; ties break toward the lowest class index.
/// Returns elapsed wall-clock seconds (reported as T_predict).
template <class Scalar>
PredictResult predict(const Model<Scalar>& model,
                      const LabeledImageSet<Scalar>& data) {
  detail::checkBatchShape(model, data.images.channels, data.images.height,
                          data.images.width);
  const auto start = std::chrono::steady_clock::now();
  constexpr Index kEvalBatch = 256;
  PredictResult out;
  out.labels.reserve(static_cast<std::size_t>(data.count()));
  std::vector<Index> order(static_cast<std::size_t>(data.count()));
  std::iota(order.begin(), order.end(), Index(0));
  for (Index at = 0; at < data.count(); at += kEvalBatch) {
    const Index end = std::min(data.count(), at + kEvalBatch);
    const MatrixRM<Scalar> probs = detail::forwardFeature<Scalar>(
        model,
        detail::gatherBatch(data, order, static_cast<std::size_t>(at),
                            static_cast<std::size_t>(end)),
        end - at, data.images.height, data.images.width, nullptr);
    for (Index b = 0; b < probs.cols(); ++b) {
      Index best = 0;
      for (Index c = 1; c < probs.rows(); ++c) {
        if (probs(c, b) > probs(best, b)) {
          best = c;
        }
      }
      out.labels.push_back(static_cast<int>(best));
    }
  }
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

}  // namespace cmcnn
