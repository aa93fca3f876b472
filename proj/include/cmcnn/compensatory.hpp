#pragma once

#include <functional>
#include <vector>

#include "cmcnn/arch.hpp"
#include "cmcnn/eval_record.hpp"
#include "cmcnn/ga.hpp"

namespace cmcnn {

/// Compensatory fitness: alpha = w*F + (1-w)*(1-S). Monotone increasing in
/// F and decreasing in S; stays in [0,1] on its domain.
double alpha(double f, double sizeRatioValue, double w);

/// S = n / m, the model size ratio against the m-layer reference.
double sizeRatio(int nConvLayers, int referenceLayers);

/// Energy estimate E = C * T * speed^exponent. E is proportional to the
/// execution time T, which is why trimming layers also trims energy; this
/// is a reporting utility only and never enters the fitness.
double estimateEnergy(double c, double seconds, double instructionsPerSecond,
                      double exponent);

/// Completes an EvalRecord from its primary measurements (alphas are always
/// derived here, never supplied).
EvalRecord makeEvalRecord(double f1Train, double f1Test, double sizeRatioValue,
                          double w, double tTrainSeconds,
                          double tPredictSeconds, std::int64_t paramBytes);

struct ArchRunResult {
  ArchSpec arch;
  Individual best;
  double best_alpha = 0.0;  // alpha of `best` under the run's w
  double size_ratio = 0.0;
  std::vector<GenerationStats> history;
  std::int64_t evaluations = 0;
  double search_seconds = 0.0;  // whole GA run for this architecture
  double total_train_seconds = 0.0;    // summed over every evaluation
  double total_predict_seconds = 0.0;
};

struct CompensatoryResult {
  std::size_t winner_index = 0;
  std::vector<ArchRunResult> per_arch;

  const ArchRunResult& winner() const { return per_arch[winner_index]; }
};

/// Builds the genome scorer for one architecture (e.g. closing over the
/// datasets and training configuration).
using ArchEvaluatorFactory = std::function<GenomeEvaluator(const ArchSpec&)>;

/// Runs the GA once per architecture, scores each architecture's best by
/// alpha, and picks the overall winner. Alpha ties break toward the smaller
/// architecture. All architectures must share reference_layers.
CompensatoryResult runCompensatory(const std::vector<ArchSpec>& archs,
                                   const GaConfig& cfg, double w,
                                   const ArchEvaluatorFactory& makeEvaluator);

/// argmax over per-architecture alphas; ties go to the smaller n.
std::size_t selectWinner(const std::vector<double>& alphas,
                         const std::vector<int>& nValues);

}  // namespace cmcnn
