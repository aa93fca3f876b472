#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cmcnn/arch.hpp"
#include "cmcnn/errors.hpp"
#include "cmcnn/genome.hpp"
#include "cmcnn/rng.hpp"
#include "cmcnn/tensor.hpp"

namespace cmcnn {

/// One [conv 3x3 -> activation (-> 2x2 max-pool)] block.
/// weight has one row per output channel; columns follow
/// (in_channel * 9 + dy * 3 + dx), matching the im2col patch layout.
template <class Scalar>
struct ConvBlock {
  MatrixRM<Scalar> weight;  // (out_channels, in_channels * 9)
  VectorX<Scalar> bias;     // (out_channels)
  Activation activation = Activation::Relu;
  bool pool_after = false;
};

template <class Scalar>
struct DenseHead {
  MatrixRM<Scalar> weight;  // (num_classes, head_channels)
  VectorX<Scalar> bias;     // (num_classes)
};

template <class Scalar>
struct Model {
  ArchSpec arch;
  Genome genome;
  std::vector<ConvBlock<Scalar>> blocks;
  DenseHead<Scalar> head;

  std::int64_t paramCount() const { return parameterCount(arch); }
  std::int64_t paramBytes() const { return parameterBytes(arch); }

  /// Visits each parameter array in the canonical (checkpoint) order:
  /// per block weight then bias, finally head weight and bias.
  template <class Fn>
  void visitParams(Fn&& fn) {
    for (auto& b : blocks) {
      fn(b.weight.data(), b.weight.size());
      fn(b.bias.data(), b.bias.size());
    }
    fn(head.weight.data(), head.weight.size());
    fn(head.bias.data(), head.bias.size());
  }
  template <class Fn>
  void visitParams(Fn&& fn) const {
    for (const auto& b : blocks) {
      fn(b.weight.data(), b.weight.size());
      fn(b.bias.data(), b.bias.size());
    }
    fn(head.weight.data(), head.weight.size());
    fn(head.bias.data(), head.bias.size());
  }

  std::vector<Scalar> flatParams() const {
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(paramCount()));
    visitParams([&](const Scalar* p, Eigen::Index n) {
      out.insert(out.end(), p, p + n);
    });
    return out;
  }

  void setFlatParams(const std::vector<Scalar>& flat) {
    if (static_cast<std::int64_t>(flat.size()) != paramCount()) {
      throw ShapeError("setFlatParams: wrong parameter count");
    }
    std::size_t at = 0;
    visitParams([&](Scalar* p, Eigen::Index n) {
      std::copy(flat.begin() + at, flat.begin() + at + n, p);
      at += static_cast<std::size_t>(n);
    });
  }
};

/// Builds a model whose i-th conv block uses genome[i]. Weights are uniform
/// in +-sqrt(6 / fan_in) drawn from a labeled stream of `seed`; biases are
/// zero. Identical (arch, genome, seed) gives bit-identical weights.
template <class Scalar>
Model<Scalar> buildModel(const ArchSpec& arch, const Genome& genome,
                         std::uint64_t seed) {
  arch.validate();
  if (static_cast<int>(genome.size()) != arch.n_conv_layers) {
    throw GenomeArityError("buildModel: genome length " +
                           std::to_string(genome.size()) +
                           " != n_conv_layers " +
                           std::to_string(arch.n_conv_layers));
  }
  const NetworkPlan plan = planNetwork(arch);

  Model<Scalar> model;
  model.arch = arch;
  model.genome = genome;
  model.blocks.reserve(plan.blocks.size());

  const auto fillUniform = [](MatrixRM<Scalar>& w, double bound,
                              RngStream& rng) {
    Scalar* p = w.data();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      p[i] = static_cast<Scalar>((2.0 * rng.nextReal() - 1.0) * bound);
    }
  };

  for (std::size_t i = 0; i < plan.blocks.size(); ++i) {
    const ConvBlockPlan& bp = plan.blocks[i];
    ConvBlock<Scalar> block;
    const int fanIn = bp.in_channels * kKernelSize * kKernelSize;
    block.weight.resize(bp.out_channels, fanIn);
    RngStream rng(deriveSeed(seed, "conv-weights", i));
    fillUniform(block.weight, std::sqrt(6.0 / fanIn), rng);
    block.bias = VectorX<Scalar>::Zero(bp.out_channels);
    block.activation = genome[i];
    block.pool_after = bp.pool_after;
    model.blocks.push_back(std::move(block));
  }

  model.head.weight.resize(arch.num_classes, plan.head_channels);
  RngStream rng(deriveSeed(seed, "head-weights"));
  fillUniform(model.head.weight, std::sqrt(6.0 / plan.head_channels), rng);
  model.head.bias = VectorX<Scalar>::Zero(arch.num_classes);
  return model;
}

}  // namespace cmcnn
