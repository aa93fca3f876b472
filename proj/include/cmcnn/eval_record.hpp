#pragma once

#include <cstdint>

namespace cmcnn {

/// Everything the result tables need about one trained model.
struct EvalRecord {
  double f1_train = 0.0;
  double f1_test = 0.0;
  double size_ratio = 0.0;   // S = n_conv_layers / reference_layers
  double alpha_train = 0.0;  // w*f1_train + (1-w)*(1-S)
  double alpha_test = 0.0;
  double w = 0.7;            // the weight the alphas were computed with
  double t_train_seconds = 0.0;
  double t_predict_seconds = 0.0;
  std::int64_t param_bytes = 0;
};

}  // namespace cmcnn
