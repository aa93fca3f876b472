#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmcnn {

inline constexpr int kResultsSchemaVersion = 1;

/// Every tunable of a run. Config files use the flat dotted keys noted at
/// each field; each key also has a same-named CLI flag, and the CLI wins.
struct ExperimentConfig {
  std::string data_dir;             // data.dir (env CMCNN_DATA_DIR fallback)
  std::string partition = "first";  // data.partition: first | second
  long n_train = 20000;             // data.n_train
  long n_test = 5000;               // data.n_test
  std::vector<int> arch_grid = {4, 6, 8, 10};  // arch.grid
  int reference_m = 10;             // arch.reference_m
  int base_channels = 16;           // arch.base_channels
  double w = 0.7;                   // fitness.w
  std::string fitness = "train_f1";  // fitness.metric: train_f1 | test_f1
  int population = 4;               // ga.population
  int generations = 5;              // ga.generations
  double mutation_prob = 1.0;       // ga.mutation_prob
  std::string selection = "roulette";  // ga.selection: roulette | uniform
  int epochs = 15;                  // train.epochs
  int batch_size = 32;              // train.batch_size
  double learning_rate = 0.01;      // train.learning_rate
  double momentum = 0.9;            // train.momentum
  std::string genome;               // train.genome (the `train` subcommand)
  std::string metric_average = "macro";  // metrics.average: macro | micro
  std::uint64_t seed = 1;           // run.seed
  int jobs = 1;                     // run.jobs
  std::string out = "out";          // run.out
  std::string evaluator = "train";  // run.evaluator: train | surrogate
  int enum_n = 4;                   // enumerate.n
  std::uint64_t enum_cap = 65536;   // enumerate.cap

  void validate() const;
  void applyKey(const std::string& key, const std::string& value);
  void applyFile(const std::filesystem::path& file);

  /// Echo of the result-affecting keys (run.jobs and run.out excluded so
  /// reruns with different parallelism or output paths stay byte-identical).
  nlohmann::json echoJson() const;
};

std::vector<int> parseArchGrid(const std::string& text);

/// `search`: Algorithm-2 run over the architecture grid; writes
/// results.json, tables.{txt,csv,json}, generations.jsonl, and (in train
/// mode) per-architecture best checkpoints under <out>/checkpoints/.
void runSearchCommand(const ExperimentConfig& cfg);

/// `baseline`: random model selection at the same evaluation budget as the
/// GA (N*(M+1) per architecture); same artifact set as `search`.
void runBaselineCommand(const ExperimentConfig& cfg);

/// `enumerate`: prints the search-space header, scores every genome, and
/// writes the complete descending ranking to <out>/ranked.csv.
void runEnumerateCommand(const ExperimentConfig& cfg);

/// `train`: trains one fixed genome (debug path); writes a checkpoint and
/// a result record.
void runTrainCommand(const ExperimentConfig& cfg);

/// `report`: re-renders tables from one or more results.json files.
/// With an empty `out`, prints text tables to stdout.
void runReportCommand(const std::vector<std::filesystem::path>& resultsFiles,
                      const std::string& out);

}  // namespace cmcnn
