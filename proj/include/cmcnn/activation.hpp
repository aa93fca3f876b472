#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cmcnn/errors.hpp"

namespace cmcnn {

/// Per-layer nonlinearity. The enum order defines the canonical ordering of
/// the default function set and the lexicographic order of genomes.
enum class Activation : std::uint8_t {
  Relu = 0,
  Sig = 1,
  Tanh = 2,
  Elu = 3,
};

inline constexpr std::array<Activation, 4> kAllActivations = {
    Activation::Relu, Activation::Sig, Activation::Tanh, Activation::Elu};

/// Ordered candidate set {RELU, SIG, TANH, ELU}.
using FunctionSet = std::vector<Activation>;

inline FunctionSet defaultFunctionSet() {
  return {kAllActivations.begin(), kAllActivations.end()};
}

template <class Scalar>
Scalar activationValue(Activation f, Scalar x) {
  switch (f) {
    case Activation::Relu:
      return x > Scalar(0) ? x : Scalar(0);
    case Activation::Sig:
      return Scalar(1) / (Scalar(1) + std::exp(-x));
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Elu:
      // Unit ELU scale; x for x > 0, else e^x - 1.
      return x > Scalar(0) ? x : std::expm1(x);
  }
  return Scalar(0);
}

/// d(activationValue)/dx. At the RELU/ELU kink the one-sided left value is
/// used (slope 0 resp. 1).
template <class Scalar>
Scalar activationSlope(Activation f, Scalar x) {
  switch (f) {
    case Activation::Relu:
      return x > Scalar(0) ? Scalar(1) : Scalar(0);
    case Activation::Sig: {
      const Scalar s = Scalar(1) / (Scalar(1) + std::exp(-x));
      return s * (Scalar(1) - s);
    }
    case Activation::Tanh: {
      const Scalar t = std::tanh(x);
      return Scalar(1) - t * t;
    }
    case Activation::Elu:
      return x > Scalar(0) ? Scalar(1) : std::exp(x);
  }
  return Scalar(0);
}

inline std::string_view activationName(Activation f) {
  switch (f) {
    case Activation::Relu:
      return "RELU";
    case Activation::Sig:
      return "SIG";
    case Activation::Tanh:
      return "TANH";
    case Activation::Elu:
      return "ELU";
  }
  return "?";
}

inline Activation activationFromString(std::string_view name) {
  for (const Activation f : kAllActivations) {
    if (name == activationName(f)) {
      return f;
    }
  }
  throw ConfigError("unknown activation function: " + std::string(name));
}

}  // namespace cmcnn
