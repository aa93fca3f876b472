#include "cmcnn/compensatory.hpp"

#include <chrono>
#include <cmath>

#include "cmcnn/errors.hpp"

namespace cmcnn {

double alpha(double f, double sizeRatioValue, double w) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw DomainError("alpha: F must be in [0, 1]");
  }
  if (!(sizeRatioValue > 0.0 && sizeRatioValue <= 1.0)) {
    throw DomainError("alpha: S must be in (0, 1]");
  }
  if (!(w >= 0.0 && w <= 1.0)) {
    throw DomainError("alpha: w must be in [0, 1]");
  }
  return w * f + (1.0 - w) * (1.0 - sizeRatioValue);
}

double sizeRatio(int nConvLayers, int referenceLayers) {
  if (referenceLayers < 1 || nConvLayers < 1 ||
      nConvLayers > referenceLayers) {
    throw DomainError("sizeRatio: need 1 <= n <= m");
  }
  return static_cast<double>(nConvLayers) /
         static_cast<double>(referenceLayers);
}

double estimateEnergy(double c, double seconds, double instructionsPerSecond,
                      double exponent) {
  if (!(c > 0.0) || !(seconds > 0.0) || !(instructionsPerSecond > 0.0) ||
      !(exponent > 0.0)) {
    throw DomainError("estimateEnergy: all inputs must be positive");
  }
  return c * seconds * std::pow(instructionsPerSecond, exponent);
}

EvalRecord makeEvalRecord(double f1Train, double f1Test, double sizeRatioValue,
                          double w, double tTrainSeconds,
                          double tPredictSeconds, std::int64_t paramBytes) {
  EvalRecord rec;
  rec.f1_train = f1Train;
  rec.f1_test = f1Test;
  rec.size_ratio = sizeRatioValue;
  rec.w = w;
  rec.alpha_train = alpha(f1Train, sizeRatioValue, w);
  rec.alpha_test = alpha(f1Test, sizeRatioValue, w);
  rec.t_train_seconds = tTrainSeconds;
  rec.t_predict_seconds = tPredictSeconds;
  rec.param_bytes = paramBytes;
  return rec;
}

std::size_t selectWinner(const std::vector<double>& alphas,
                         const std::vector<int>& nValues) {
  if (alphas.empty() || alphas.size() != nValues.size()) {
    throw ConfigError("selectWinner: empty or mismatched inputs");
  }
  std::size_t winner = 0;
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (alphas[i] > alphas[winner] ||
        (alphas[i] == alphas[winner] && nValues[i] < nValues[winner])) {
      winner = i;
    }
  }
  return winner;
}

CompensatoryResult runCompensatory(const std::vector<ArchSpec>& archs,
                                   const GaConfig& cfg, double w,
                                   const ArchEvaluatorFactory& makeEvaluator) {
  if (archs.empty()) {
    throw ConfigError("runCompensatory: empty architecture list");
  }
  for (std::size_t i = 0; i < archs.size(); ++i) {
    archs[i].validate();
    if (archs[i].reference_layers != archs.front().reference_layers) {
      throw ConfigError(
          "runCompensatory: architectures must share reference_layers");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (archs[j].n_conv_layers == archs[i].n_conv_layers) {
        throw ConfigError("runCompensatory: duplicate architecture n = " +
                          std::to_string(archs[i].n_conv_layers));
      }
    }
  }

  CompensatoryResult result;
  std::vector<double> alphas;
  std::vector<int> ns;
  for (const ArchSpec& arch : archs) {
    // Evolve this architecture with its own seed stream, then score its
    // best individual by alpha.
    GaConfig archCfg = cfg;
    archCfg.master_seed = deriveSeed(
        cfg.master_seed, "arch", static_cast<std::uint64_t>(arch.n_conv_layers));
    const auto t0 = std::chrono::steady_clock::now();
    GaResult ga = runGa(static_cast<std::size_t>(arch.n_conv_layers), archCfg,
                        makeEvaluator(arch));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    ArchRunResult run;
    run.arch = arch;
    run.size_ratio = sizeRatio(arch.n_conv_layers, arch.reference_layers);
    run.best_alpha = alpha(ga.best.fitness, run.size_ratio, w);
    run.best = std::move(ga.best);
    run.history = std::move(ga.history);
    run.evaluations = ga.evaluations;
    run.search_seconds = seconds;
    run.total_train_seconds = ga.total_train_seconds;
    run.total_predict_seconds = ga.total_predict_seconds;
    alphas.push_back(run.best_alpha);
    ns.push_back(arch.n_conv_layers);
    result.per_arch.push_back(std::move(run));
  }

  // The overall best compensatory model.
  result.winner_index = selectWinner(alphas, ns);
  return result;
}

}  // namespace cmcnn
