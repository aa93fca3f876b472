#include <cmath>

#include <doctest.h>

#include "cmcnn/activation.hpp"
#include "cmcnn/rng.hpp"

using namespace cmcnn;

TEST_CASE("activation values match their definitions") {
  CHECK(activationValue(Activation::Relu, -1.5) == 0.0);
  CHECK(activationValue(Activation::Relu, 2.0) == 2.0);
  CHECK(activationValue(Activation::Relu, 0.0) == 0.0);

  CHECK(activationValue(Activation::Sig, 0.0) == doctest::Approx(0.5));
  CHECK(activationValue(Activation::Sig, 2.0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));

  CHECK(activationValue(Activation::Tanh, 0.7) ==
        doctest::Approx(std::tanh(0.7)));

  CHECK(activationValue(Activation::Elu, 1.5) == 1.5);
  CHECK(activationValue(Activation::Elu, -1.0) ==
        doctest::Approx(std::exp(-1.0) - 1.0));
}

TEST_CASE("derivatives agree with finite differences at 1000 random points") {
  RngStream rng(1234);
  const double h = 1e-5;
  for (int i = 0; i < 1000; ++i) {
    const Activation f = kAllActivations[rng.nextBelow(4)];
    double x = rng.nextReal() * 12.0 - 6.0;
    // Keep away from the RELU/ELU kink where the derivative jumps.
    if (std::abs(x) < 1e-3) {
      x += 0.01;
    }
    const double numeric =
        (activationValue(f, x + h) - activationValue(f, x - h)) / (2.0 * h);
    CHECK(std::abs(activationSlope(f, x) - numeric) <= 1e-6);
  }
}

TEST_CASE("names round-trip and bad names are rejected") {
  for (const Activation f : kAllActivations) {
    CHECK(activationFromString(activationName(f)) == f);
  }
  CHECK_THROWS_AS(activationFromString("RELU6"), ConfigError);
  CHECK_THROWS_AS(activationFromString("relu"), ConfigError);
}
