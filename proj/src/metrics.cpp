#include "cmcnn/metrics.hpp"

#include "cmcnn/errors.hpp"

namespace cmcnn {

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int numClasses) {
  if (truth.size() != predicted.size()) {
    throw MetricInputError("confusion: label vectors differ in length");
  }
  if (numClasses < 1) {
    throw MetricInputError("confusion: numClasses must be >= 1");
  }
  ConfusionMatrix cm;
  cm.counts.setZero(numClasses, numClasses);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 0 || t >= numClasses || p < 0 || p >= numClasses) {
      throw MetricInputError("confusion: label out of range at index " +
                             std::to_string(i));
    }
    ++cm.counts(t, p);
  }
  return cm;
}

double macroF1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) {
    throw MetricInputError("macroF1: empty confusion matrix");
  }
  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < cm.numClasses(); ++c) {
    const auto tp = static_cast<double>(cm.counts(c, c));
    const auto truePos = static_cast<double>(cm.counts.row(c).sum());
    const auto predPos = static_cast<double>(cm.counts.col(c).sum());
    if (truePos == 0.0 && predPos == 0.0) {
      continue;  // class absent on both sides
    }
    const double precision = predPos > 0.0 ? tp / predPos : 0.0;
    const double recall = truePos > 0.0 ? tp / truePos : 0.0;
    const double denom = precision + recall;
    sum += denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
    ++included;
  }
  return sum / static_cast<double>(included);
}

double microF1(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) {
    throw MetricInputError("microF1: empty confusion matrix");
  }
  const std::int64_t tp = cm.counts.trace();
  // Pooled precision and recall both equal tp/total here.
  return static_cast<double>(tp) / static_cast<double>(total);
}

double f1Score(const ConfusionMatrix& cm, MetricAverage average) {
  return average == MetricAverage::Macro ? macroF1(cm) : microF1(cm);
}

}  // namespace cmcnn
