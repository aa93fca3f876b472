#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cmcnn/eval_record.hpp"
#include "cmcnn/genome.hpp"
#include "cmcnn/network.hpp"

namespace cmcnn {

enum class SelectionScheme { RouletteWheel, UniformRandom };
enum class FitnessMetric { TrainF1, TestF1 };

struct GaConfig {
  int population_size = 4;  // N; must be even
  int generations = 5;      // M; 0 runs only the random initialization
  double mutation_prob = 1.0;
  FunctionSet function_set = defaultFunctionSet();
  FitnessMetric fitness_metric = FitnessMetric::TrainF1;
  SelectionScheme selection = SelectionScheme::RouletteWheel;
  TrainConfig train_config{};
  std::uint64_t master_seed = 0;
  int jobs = 1;

  void validate() const;
};

struct Individual {
  Genome genome;
  double fitness = 0.0;
  bool evaluated = false;
  bool failed = false;          // evaluator threw; fitness pinned to 0
  std::uint64_t eval_seed = 0;  // seed the evaluator was given
  std::optional<EvalRecord> record;
};

struct EvalOutcome {
  double fitness = 0.0;
  std::optional<EvalRecord> record;
};

/// Scores one genome. Must be deterministic given (genome, seed); a thrown
/// exception marks the individual failed with fitness 0.
using GenomeEvaluator =
    std::function<EvalOutcome(const Genome&, std::uint64_t seed)>;

struct GenerationStats {
  int generation = 0;     // 0 is the random initial population
  double best_f = 0.0;    // best fitness in the retained population
  double mean_f = 0.0;    // mean fitness over the retained population
  double best_ever_f = 0.0;
  Genome best_genome;
};

struct GaResult {
  Individual best;  // best individual ever evaluated
  std::vector<GenerationStats> history;  // one entry per generation, M+1 total
  std::vector<Individual> final_population;
  std::int64_t evaluations = 0;
  // Summed over every evaluation that produced a record.
  double total_train_seconds = 0.0;
  double total_predict_seconds = 0.0;
};

/// The generational GA over activation-function strings: uniform random
/// init, fitness evaluation, pair selection, single-point crossover,
/// single-point mutation, then elitist truncation of parents + children
/// back to N. Evaluation may run on `jobs` threads; the trajectory is
/// identical for any jobs value because every random draw comes from a
/// labeled per-generation stream and every evaluation seed is preassigned.
GaResult runGa(std::size_t genomeLength, const GaConfig& cfg,
               const GenomeEvaluator& evaluator);

/// Evaluates the same number of models as runGa (N * (M+1)), all with
/// uniformly random genomes, and keeps the best: the non-GA baseline.
GaResult runRandomSelection(std::size_t genomeLength, const GaConfig& cfg,
                            const GenomeEvaluator& evaluator);

struct ExhaustiveResult {
  Genome best;
  double best_f = 0.0;
  std::uint64_t evaluated = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 65536;

/// Scores every genome of the m^n space in lexicographic order (function-set
/// order defines the alphabet order); ties keep the lexicographically first.
ExhaustiveResult exhaustiveSearch(
    std::size_t n, const FunctionSet& set,
    const std::function<double(const Genome&)>& score,
    std::uint64_t cap = kDefaultEnumerationCap);

/// Full ranked enumeration (descending score, stable within ties).
std::vector<std::pair<Genome, double>> enumerateRanked(
    std::size_t n, const FunctionSet& set,
    const std::function<double(const Genome&)>& score,
    std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace cmcnn
