#include <cmath>
#include <vector>

#include <doctest.h>

#include "cmcnn/network.hpp"

using namespace cmcnn;

namespace {

ArchSpec tinyArch(int n, int baseChannels, int classes, int inC, int side) {
  ArchSpec arch;
  arch.n_conv_layers = n;
  arch.reference_layers = 10;
  arch.base_channels = baseChannels;
  arch.num_classes = classes;
  arch.input_channels = inC;
  arch.input_height = side;
  arch.input_width = side;
  return arch;
}

template <class Scalar>
void zeroAllParams(Model<Scalar>& model) {
  model.visitParams([](Scalar* p, Eigen::Index n) {
    std::fill(p, p + n, Scalar(0));
  });
}

template <class Scalar>
Tensor4<Scalar> randomBatch(Index b, Index c, Index h, Index w,
                            std::uint64_t seed) {
  Tensor4<Scalar> batch(b, c, h, w);
  RngStream rng(seed);
  for (Index i = 0; i < batch.size(); ++i) {
    batch.data[i] = static_cast<Scalar>(rng.nextReal() * 2.0 - 1.0);
  }
  return batch;
}

/// Loss recomputed from the public forward() path, for finite differences.
template <class Scalar>
double lossOf(const Model<Scalar>& model, const Tensor4<Scalar>& batch,
              const std::vector<int>& labels) {
  const MatrixRM<Scalar> probs = forward(model, batch);
  double loss = 0.0;
  for (Index b = 0; b < probs.rows(); ++b) {
    loss -= std::log(static_cast<double>(
        probs(b, labels[static_cast<std::size_t>(b)])));
  }
  return loss / static_cast<double>(probs.rows());
}

}  // namespace

TEST_CASE("all-zero weights give uniform class probabilities") {
  const ArchSpec arch = tinyArch(2, 4, 5, 3, 8);
  Model<float> model = buildModel<float>(
      arch, Genome::fromString("RELU-TANH"), 3);
  zeroAllParams(model);
  const auto batch = randomBatch<float>(6, 3, 8, 8, 11);
  const MatrixRM<float> probs = forward(model, batch);
  REQUIRE(probs.rows() == 6);
  REQUIRE(probs.cols() == 5);
  for (Index b = 0; b < probs.rows(); ++b) {
    for (Index c = 0; c < probs.cols(); ++c) {
      CHECK(probs(b, c) == doctest::Approx(0.2).epsilon(1e-6));
    }
  }
}

TEST_CASE("softmax rows sum to one") {
  const ArchSpec arch = tinyArch(3, 4, 7, 2, 6);
  const Model<float> model = buildModel<float>(
      arch, Genome::fromString("SIG-ELU-RELU"), 17);
  const auto batch = randomBatch<float>(9, 2, 6, 6, 5);
  const MatrixRM<float> probs = forward(model, batch);
  for (Index b = 0; b < probs.rows(); ++b) {
    CHECK(std::abs(probs.row(b).sum() - 1.0f) <= 1e-5f);
    for (Index c = 0; c < probs.cols(); ++c) {
      CHECK(probs(b, c) >= 0.0f);
      CHECK(probs(b, c) <= 1.0f);
    }
  }
}

TEST_CASE("forward rejects a wrong input shape") {
  const ArchSpec arch = tinyArch(1, 2, 3, 3, 8);
  const Model<float> model =
      buildModel<float>(arch, Genome::fromString("RELU"), 1);
  CHECK_THROWS_AS(forward(model, randomBatch<float>(2, 3, 4, 4, 1)),
                  ShapeError);
  CHECK_THROWS_AS(forward(model, randomBatch<float>(2, 1, 8, 8, 1)),
                  ShapeError);
}

TEST_CASE("one conv block matches a direct-convolution oracle on 3x3") {
  // One block, one input channel, two output channels, 3x3 image, no pool.
  const ArchSpec arch = tinyArch(1, 2, 2, 1, 3);
  Model<double> model = buildModel<double>(arch, Genome::fromString("ELU"), 0);

  const std::vector<double> kernel0 = {0.1, -0.2, 0.3, 0.0, 1.0,
                                       -0.5, 0.25, 0.5, -1.0};
  const std::vector<double> kernel1 = {-1.0, 0.0, 0.5, 0.75, -0.25,
                                       0.2, 0.0, -0.6, 0.9};
  for (int i = 0; i < 9; ++i) {
    model.blocks[0].weight(0, i) = kernel0[static_cast<std::size_t>(i)];
    model.blocks[0].weight(1, i) = kernel1[static_cast<std::size_t>(i)];
  }
  model.blocks[0].bias << 0.05, -0.15;
  model.head.weight << 1.0, -0.5, 0.25, 0.75;
  model.head.bias << 0.1, -0.1;

  Tensor4<double> batch(1, 1, 3, 3);
  const std::vector<double> image = {0.2, -0.4, 0.9, 0.0, 1.2,
                                     -0.7, 0.5, -0.1, 0.3};
  for (Index i = 0; i < 9; ++i) {
    batch.data[i] = image[static_cast<std::size_t>(i)];
  }

  // Oracle: direct 3x3 convolution with zero padding, ELU, spatial mean,
  // dense layer, softmax. Nested loops on purpose; no shared code.
  double gap[2] = {0.0, 0.0};
  for (int oc = 0; oc < 2; ++oc) {
    const std::vector<double>& k = oc == 0 ? kernel0 : kernel1;
    const double bias = oc == 0 ? 0.05 : -0.15;
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        double acc = bias;
        for (int dy = 0; dy < 3; ++dy) {
          for (int dx = 0; dx < 3; ++dx) {
            const int sy = y + dy - 1;
            const int sx = x + dx - 1;
            if (sy < 0 || sy >= 3 || sx < 0 || sx >= 3) continue;
            acc += k[static_cast<std::size_t>(dy * 3 + dx)] *
                   image[static_cast<std::size_t>(sy * 3 + sx)];
          }
        }
        gap[oc] += acc > 0.0 ? acc : std::expm1(acc);
      }
    }
    gap[oc] /= 9.0;
  }
  const double logit0 = 1.0 * gap[0] + (-0.5) * gap[1] + 0.1;
  const double logit1 = 0.25 * gap[0] + 0.75 * gap[1] - 0.1;
  const double peak = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - peak);
  const double e1 = std::exp(logit1 - peak);

  const MatrixRM<double> probs = forward(model, batch);
  CHECK(probs(0, 0) == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));
  CHECK(probs(0, 1) == doctest::Approx(e1 / (e0 + e1)).epsilon(1e-12));
}

TEST_CASE("uniform prediction over 10 classes costs ln(10)") {
  const ArchSpec arch = tinyArch(1, 2, 10, 1, 4);
  Model<float> model = buildModel<float>(arch, Genome::fromString("RELU"), 2);
  zeroAllParams(model);
  const auto batch = randomBatch<float>(3, 1, 4, 4, 21);
  const auto [grads, loss] = backward(model, batch, {1, 7, 3});
  CHECK(loss == doctest::Approx(std::log(10.0)).epsilon(1e-5));
}

TEST_CASE("confident correct prediction has near-zero loss and gradients") {
  const ArchSpec arch = tinyArch(1, 2, 2, 1, 3);
  Model<double> model = buildModel<double>(arch, Genome::fromString("RELU"), 4);
  zeroAllParams(model);
  // Huge bias difference drives softmax to (~1, ~0) for every sample.
  model.head.bias << 50.0, -50.0;
  const auto batch = randomBatch<double>(4, 1, 3, 3, 8);
  const auto [grads, loss] = backward(model, batch, {0, 0, 0, 0});
  CHECK(loss <= 1e-12);
  CHECK(grads.head_weight.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(grads.head_bias.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(grads.block_weight[0].cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("backward rejects bad labels") {
  const ArchSpec arch = tinyArch(1, 2, 3, 1, 3);
  const Model<float> model =
      buildModel<float>(arch, Genome::fromString("SIG"), 5);
  const auto batch = randomBatch<float>(2, 1, 3, 3, 9);
  CHECK_THROWS_AS(backward(model, batch, std::vector<int>{0, 3}), LabelError);
  CHECK_THROWS_AS(backward(model, batch, std::vector<int>{0, -1}), LabelError);
  CHECK_THROWS_AS(backward(model, batch, std::vector<int>{0}), LabelError);
}

TEST_CASE("gradients stay correct through two pooling stages") {
  // n = 5 pools after blocks 2 and 4, so the backward pass crosses two
  // argmax scatters and one odd-sized (ceil) pooling.
  const ArchSpec arch = tinyArch(5, 2, 3, 1, 5);
  Model<double> model = buildModel<double>(
      arch, Genome::fromString("ELU-SIG-TANH-RELU-SIG"), 31);
  const auto batch = randomBatch<double>(2, 1, 5, 5, 77);
  const std::vector<int> labels = {2, 0};

  const auto [grads, loss] = backward(model, batch, labels);
  (void)loss;
  std::vector<double> analytic;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    analytic.insert(analytic.end(), grads.block_weight[i].data(),
                    grads.block_weight[i].data() + grads.block_weight[i].size());
    analytic.insert(analytic.end(), grads.block_bias[i].data(),
                    grads.block_bias[i].data() + grads.block_bias[i].size());
  }
  analytic.insert(analytic.end(), grads.head_weight.data(),
                  grads.head_weight.data() + grads.head_weight.size());
  analytic.insert(analytic.end(), grads.head_bias.data(),
                  grads.head_bias.data() + grads.head_bias.size());

  const double h = 1e-4;
  std::size_t at = 0;
  model.visitParams([&](double* p, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
      const double saved = p[i];
      p[i] = saved + h;
      const double up = lossOf(model, batch, labels);
      p[i] = saved - h;
      const double down = lossOf(model, batch, labels);
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[at++];
      const double denom = std::max({1.0, std::abs(a), std::abs(numeric)});
      CHECK(std::abs(a - numeric) / denom <= 1e-4);
    }
  });
}

TEST_CASE("analytic gradients match central differences (20 random models)") {
  RngStream pick(20250810);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(pick.nextBelow(3));
    const int base = 2 + static_cast<int>(pick.nextBelow(2));
    const int classes = 2 + static_cast<int>(pick.nextBelow(3));
    const int inC = 1 + static_cast<int>(pick.nextBelow(2));
    const int side = 4 + static_cast<int>(pick.nextBelow(2));
    const ArchSpec arch = tinyArch(n, base, classes, inC, side);

    RngStream genomeRng(pick.nextU64());
    const Genome genome = randomGenome(static_cast<std::size_t>(n),
                                       defaultFunctionSet(), genomeRng);
    Model<double> model = buildModel<double>(arch, genome, pick.nextU64());
    const auto batch = randomBatch<double>(2, inC, side, side, pick.nextU64());
    std::vector<int> labels = {static_cast<int>(pick.nextBelow(classes)),
                               static_cast<int>(pick.nextBelow(classes))};

    const auto [grads, loss] = backward(model, batch, labels);
    // Flatten the gradients in the same canonical order visitParams uses.
    std::vector<double> analytic;
    analytic.reserve(static_cast<std::size_t>(model.paramCount()));
    for (std::size_t i = 0; i < model.blocks.size(); ++i) {
      analytic.insert(analytic.end(), grads.block_weight[i].data(),
                      grads.block_weight[i].data() +
                          grads.block_weight[i].size());
      analytic.insert(analytic.end(), grads.block_bias[i].data(),
                      grads.block_bias[i].data() + grads.block_bias[i].size());
    }
    analytic.insert(analytic.end(), grads.head_weight.data(),
                    grads.head_weight.data() + grads.head_weight.size());
    analytic.insert(analytic.end(), grads.head_bias.data(),
                    grads.head_bias.data() + grads.head_bias.size());

    const double h = 1e-4;
    std::size_t at = 0;
    model.visitParams([&](double* p, Eigen::Index count) {
      for (Eigen::Index i = 0; i < count; ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double up = lossOf(model, batch, labels);
        p[i] = saved - h;
        const double down = lossOf(model, batch, labels);
        p[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[at++];
        const double denom = std::max({1.0, std::abs(a), std::abs(numeric)});
        CHECK(std::abs(a - numeric) / denom <= 1e-4);
      }
    });
    CHECK(at == analytic.size());
    ++checked;
    (void)loss;
  }
  CHECK(checked == 20);
}
