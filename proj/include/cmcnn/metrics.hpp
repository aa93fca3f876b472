#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace cmcnn {

enum class MetricAverage { Macro, Micro };

/// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  int numClasses() const { return static_cast<int>(counts.rows()); }
  std::int64_t total() const { return counts.sum(); }
};

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int numClasses);

/// Unweighted mean of per-class F1 = 2PR/(P+R). A class whose P+R is zero
/// scores 0; classes absent from both truth and prediction are excluded
/// from the mean.
double macroF1(const ConfusionMatrix& cm);

/// Pooled-count F1 (equals accuracy for single-label multi-class).
double microF1(const ConfusionMatrix& cm);

double f1Score(const ConfusionMatrix& cm, MetricAverage average);

}  // namespace cmcnn
