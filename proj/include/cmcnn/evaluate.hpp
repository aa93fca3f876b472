#pragma once

#include "cmcnn/compensatory.hpp"
#include "cmcnn/data.hpp"
#include "cmcnn/ga.hpp"
#include "cmcnn/metrics.hpp"

namespace cmcnn {

/// Trains a model built from the genome and scores it on both splits.
/// Deterministic given (arch, genome, datasets, cfg, seed).
EvalOutcome evaluateByTraining(const ArchSpec& arch, const Genome& genome,
                               const Dataset& trainSet, const Dataset& testSet,
                               const TrainConfig& cfg, double w,
                               MetricAverage average, FitnessMetric metric,
                               std::uint64_t seed);

/// Genome scorer backed by real training; captures the datasets by
/// reference, so they must outlive the returned callable.
GenomeEvaluator makeTrainingEvaluator(const ArchSpec& arch,
                                      const Dataset& trainSet,
                                      const Dataset& testSet,
                                      const TrainConfig& cfg, double w,
                                      MetricAverage average,
                                      FitnessMetric metric);

/// The deterministic surrogate landscape used by GA correctness checks and
/// fast CLI runs: F = fraction of genes equal to RELU.
double surrogateReluFraction(const Genome& genome);

/// Genome scorer on the surrogate landscape; fills an EvalRecord with
/// f1_train = f1_test = F and zero timings.
GenomeEvaluator makeSurrogateEvaluator(const ArchSpec& arch, double w);

/// Re-trains `individual`'s genome with its recorded evaluation seed,
/// reproducing the exact model the GA scored.
Model<float> rebuildTrainedModel(const ArchSpec& arch,
                                 const Individual& individual,
                                 const Dataset& trainSet,
                                 const TrainConfig& cfg);

}  // namespace cmcnn
