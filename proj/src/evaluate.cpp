#include "cmcnn/evaluate.hpp"

#include "cmcnn/network.hpp"

namespace cmcnn {

EvalOutcome evaluateByTraining(const ArchSpec& arch, const Genome& genome,
                               const Dataset& trainSet, const Dataset& testSet,
                               const TrainConfig& cfg, double w,
                               MetricAverage average, FitnessMetric metric,
                               std::uint64_t seed) {
  Model<float> model = buildModel<float>(arch, genome,
                                         deriveSeed(seed, "model-init"));
  TrainConfig runCfg = cfg;
  runCfg.seed = deriveSeed(seed, "train");
  const double tTrain = train(model, trainSet, runCfg);

  const PredictResult onTrain = predict(model, trainSet);
  const PredictResult onTest = predict(model, testSet);
  const double f1Train = f1Score(
      confusion(trainSet.labels, onTrain.labels, arch.num_classes), average);
  const double f1Test = f1Score(
      confusion(testSet.labels, onTest.labels, arch.num_classes), average);

  EvalOutcome out;
  out.record = makeEvalRecord(
      f1Train, f1Test, sizeRatio(arch.n_conv_layers, arch.reference_layers),
      w, tTrain, onTrain.seconds + onTest.seconds, parameterBytes(arch));
  out.fitness = metric == FitnessMetric::TrainF1 ? f1Train : f1Test;
  return out;
}

GenomeEvaluator makeTrainingEvaluator(const ArchSpec& arch,
                                      const Dataset& trainSet,
                                      const Dataset& testSet,
                                      const TrainConfig& cfg, double w,
                                      MetricAverage average,
                                      FitnessMetric metric) {
  return [&trainSet, &testSet, arch, cfg, w, average, metric](
             const Genome& genome, std::uint64_t seed) {
    return evaluateByTraining(arch, genome, trainSet, testSet, cfg, w,
                              average, metric, seed);
  };
}

double surrogateReluFraction(const Genome& genome) {
  if (genome.empty()) {
    throw GenomeArityError("surrogateReluFraction: empty genome");
  }
  std::size_t count = 0;
  for (const Activation gene : genome) {
    if (gene == Activation::Relu) {
      ++count;
    }
  }
  return static_cast<double>(count) / static_cast<double>(genome.size());
}

GenomeEvaluator makeSurrogateEvaluator(const ArchSpec& arch, double w) {
  const double s = sizeRatio(arch.n_conv_layers, arch.reference_layers);
  const std::int64_t bytes = parameterBytes(arch);
  return [s, w, bytes](const Genome& genome, std::uint64_t) {
    const double f = surrogateReluFraction(genome);
    EvalOutcome out;
    out.fitness = f;
    out.record = makeEvalRecord(f, f, s, w, 0.0, 0.0, bytes);
    return out;
  };
}

Model<float> rebuildTrainedModel(const ArchSpec& arch,
                                 const Individual& individual,
                                 const Dataset& trainSet,
                                 const TrainConfig& cfg) {
  Model<float> model = buildModel<float>(
      arch, individual.genome, deriveSeed(individual.eval_seed, "model-init"));
  TrainConfig runCfg = cfg;
  runCfg.seed = deriveSeed(individual.eval_seed, "train");
  train(model, trainSet, runCfg);
  return model;
}

}  // namespace cmcnn
