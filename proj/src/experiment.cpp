#include "cmcnn/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cmcnn/checkpoint.hpp"
#include "cmcnn/compensatory.hpp"
#include "cmcnn/evaluate.hpp"
#include "cmcnn/report.hpp"

namespace cmcnn {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration plumbing
// ---------------------------------------------------------------------------

std::vector<int> parseArchGrid(const std::string& text) {
  std::vector<int> grid;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    try {
      grid.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw ConfigError("arch.grid: cannot parse '" + token + "'");
    }
  }
  if (grid.empty()) {
    throw ConfigError("arch.grid: empty grid");
  }
  return grid;
}

void ExperimentConfig::validate() const {
  if (partition != "first" && partition != "second") {
    throw ConfigError("data.partition must be 'first' or 'second'");
  }
  if (n_train < 1 || n_test < 1) {
    throw ConfigError("data.n_train and data.n_test must be >= 1");
  }
  if (arch_grid.empty()) {
    throw ConfigError("arch.grid must not be empty");
  }
  for (std::size_t i = 0; i < arch_grid.size(); ++i) {
    if (arch_grid[i] < 1 || arch_grid[i] > reference_m) {
      throw ConfigError("arch.grid entries must satisfy 1 <= n <= reference_m");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (arch_grid[j] == arch_grid[i]) {
        throw ConfigError("arch.grid entries must be distinct");
      }
    }
  }
  if (w < 0.0 || w > 1.0) {
    throw ConfigError("fitness.w must be in [0, 1]");
  }
  if (fitness != "train_f1" && fitness != "test_f1") {
    throw ConfigError("fitness.metric must be 'train_f1' or 'test_f1'");
  }
  if (selection != "roulette" && selection != "uniform") {
    throw ConfigError("ga.selection must be 'roulette' or 'uniform'");
  }
  if (metric_average != "macro" && metric_average != "micro") {
    throw ConfigError("metrics.average must be 'macro' or 'micro'");
  }
  if (evaluator != "train" && evaluator != "surrogate") {
    throw ConfigError("run.evaluator must be 'train' or 'surrogate'");
  }
  if (jobs < 1) {
    throw ConfigError("run.jobs must be >= 1");
  }
  if (population < 2 || population % 2 != 0) {
    throw ConfigError("ga.population must be even and >= 2");
  }
  if (generations < 0) {
    throw ConfigError("ga.generations must be >= 0");
  }
  if (mutation_prob < 0.0 || mutation_prob > 1.0) {
    throw ConfigError("ga.mutation_prob must be in [0, 1]");
  }
  if (epochs < 1 || batch_size < 1) {
    throw ConfigError("train.epochs and train.batch_size must be >= 1");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("train.learning_rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ConfigError("train.momentum must be in [0, 1)");
  }
}

void ExperimentConfig::applyKey(const std::string& key,
                                const std::string& value) {
  const auto asLong = [&] {
    try {
      return std::stol(value);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse integer '" + value + "'");
    }
  };
  const auto asDouble = [&] {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse number '" + value + "'");
    }
  };
  const auto asU64 = [&] {
    try {
      return static_cast<std::uint64_t>(std::stoull(value));
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse integer '" + value + "'");
    }
  };

  if (key == "data.dir") {
    data_dir = value;
  } else if (key == "data.partition") {
    partition = value;
  } else if (key == "data.n_train") {
    n_train = asLong();
  } else if (key == "data.n_test") {
    n_test = asLong();
  } else if (key == "arch.grid") {
    arch_grid = parseArchGrid(value);
  } else if (key == "arch.reference_m") {
    reference_m = static_cast<int>(asLong());
  } else if (key == "arch.base_channels") {
    base_channels = static_cast<int>(asLong());
  } else if (key == "fitness.w") {
    w = asDouble();
  } else if (key == "fitness.metric") {
    fitness = value;
  } else if (key == "ga.population") {
    population = static_cast<int>(asLong());
  } else if (key == "ga.generations") {
    generations = static_cast<int>(asLong());
  } else if (key == "ga.mutation_prob") {
    mutation_prob = asDouble();
  } else if (key == "ga.selection") {
    selection = value;
  } else if (key == "train.epochs") {
    epochs = static_cast<int>(asLong());
  } else if (key == "train.batch_size") {
    batch_size = static_cast<int>(asLong());
  } else if (key == "train.learning_rate") {
    learning_rate = asDouble();
  } else if (key == "train.momentum") {
    momentum = asDouble();
  } else if (key == "train.genome") {
    genome = value;
  } else if (key == "metrics.average") {
    metric_average = value;
  } else if (key == "run.seed") {
    seed = asU64();
  } else if (key == "run.jobs") {
    jobs = static_cast<int>(asLong());
  } else if (key == "run.out") {
    out = value;
  } else if (key == "run.evaluator") {
    evaluator = value;
  } else if (key == "enumerate.n") {
    enum_n = static_cast<int>(asLong());
  } else if (key == "enumerate.cap") {
    enum_cap = asU64();
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void ExperimentConfig::applyFile(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open config file " + file.string());
  }
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    const auto trim = [](const std::string& s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string()
                                        : s.substr(first, last - first + 1);
    };
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(file.string() + ":" + std::to_string(lineNo) +
                        ": expected 'key = value'");
    }
    applyKey(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

json ExperimentConfig::echoJson() const {
  json echo;
  echo["data.partition"] = partition;
  echo["data.n_train"] = n_train;
  echo["data.n_test"] = n_test;
  {
    std::string grid;
    for (std::size_t i = 0; i < arch_grid.size(); ++i) {
      grid += (i ? "," : "") + std::to_string(arch_grid[i]);
    }
    echo["arch.grid"] = grid;
  }
  echo["arch.reference_m"] = reference_m;
  echo["arch.base_channels"] = base_channels;
  echo["fitness.w"] = w;
  echo["fitness.metric"] = fitness;
  echo["ga.population"] = population;
  echo["ga.generations"] = generations;
  echo["ga.mutation_prob"] = mutation_prob;
  echo["ga.selection"] = selection;
  echo["train.epochs"] = epochs;
  echo["train.batch_size"] = batch_size;
  echo["train.learning_rate"] = learning_rate;
  echo["train.momentum"] = momentum;
  echo["metrics.average"] = metric_average;
  echo["run.seed"] = seed;
  echo["run.evaluator"] = evaluator;
  return echo;
}

// ---------------------------------------------------------------------------
// Shared run machinery
// ---------------------------------------------------------------------------

namespace {

struct LoadedData {
  Dataset train;
  Dataset test;
};

fs::path resolveDataDir(const ExperimentConfig& cfg) {
  if (!cfg.data_dir.empty()) {
    return cfg.data_dir;
  }
  if (const char* env = std::getenv("CMCNN_DATA_DIR")) {
    return env;
  }
  throw ConfigError(
      "no data directory: pass --data-dir or set CMCNN_DATA_DIR");
}

LoadedData loadPartitionedData(const ExperimentConfig& cfg) {
  const Cifar10 full = loadCifar10(resolveDataDir(cfg));
  LoadedData out;
  if (cfg.partition == "first") {
    std::tie(out.train, out.test) =
        partitionFirst(full.train, full.test, cfg.n_train, cfg.n_test);
  } else {
    std::tie(out.train, out.test) =
        partitionSecond(full.train, full.test, cfg.n_train, cfg.n_test);
  }
  return out;
}

ArchSpec archFor(const ExperimentConfig& cfg, int n) {
  ArchSpec arch;
  arch.n_conv_layers = n;
  arch.reference_layers = cfg.reference_m;
  arch.base_channels = cfg.base_channels;
  return arch;
}

GaConfig gaConfigFor(const ExperimentConfig& cfg) {
  GaConfig ga;
  ga.population_size = cfg.population;
  ga.generations = cfg.generations;
  ga.mutation_prob = cfg.mutation_prob;
  ga.fitness_metric = cfg.fitness == "train_f1" ? FitnessMetric::TrainF1
                                                : FitnessMetric::TestF1;
  ga.selection = cfg.selection == "roulette" ? SelectionScheme::RouletteWheel
                                             : SelectionScheme::UniformRandom;
  ga.train_config.epochs = cfg.epochs;
  ga.train_config.batch_size = cfg.batch_size;
  ga.train_config.learning_rate = cfg.learning_rate;
  ga.train_config.momentum = cfg.momentum;
  ga.master_seed = cfg.seed;
  ga.jobs = cfg.jobs;
  return ga;
}

MetricAverage metricAverageFor(const ExperimentConfig& cfg) {
  return cfg.metric_average == "macro" ? MetricAverage::Macro
                                       : MetricAverage::Micro;
}

void writeFile(const fs::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) {
    throw Error("cannot write " + file.string());
  }
}

json winnerSummary(const std::string& modelId, const ArchRunResult& run) {
  json summary;
  summary["model_id"] = modelId;
  summary["genome"] = run.best.genome.str();
  summary["n"] = run.arch.n_conv_layers;
  summary["m"] = run.arch.reference_layers;
  summary["size_ratio"] = run.size_ratio;
  summary["alpha"] = run.best_alpha;
  summary["fitness"] = run.best.fitness;
  summary["param_bytes"] = parameterBytes(run.arch);
  if (run.best.record) {
    summary["f1_train"] = run.best.record->f1_train;
    summary["f1_test"] = run.best.record->f1_test;
    summary["t_train_seconds"] = run.best.record->t_train_seconds;
    summary["t_predict_seconds"] = run.best.record->t_predict_seconds;
  }
  return summary;
}

json archResultJson(const std::string& modelId, const ArchRunResult& run) {
  json entry;
  entry["model_id"] = modelId;
  entry["n_conv_layers"] = run.arch.n_conv_layers;
  entry["reference_layers"] = run.arch.reference_layers;
  entry["size_ratio"] = run.size_ratio;
  entry["param_bytes"] = parameterBytes(run.arch);
  entry["genome"] = run.best.genome.str();
  entry["fitness"] = run.best.fitness;
  entry["alpha"] = run.best_alpha;
  entry["failed"] = run.best.failed;
  entry["evaluations"] = run.evaluations;
  entry["t_search_seconds"] = run.search_seconds;
  if (run.best.record) {
    entry["record"] = toJson(*run.best.record);
  } else {
    entry["record"] = nullptr;
  }
  json history = json::array();
  for (const GenerationStats& gen : run.history) {
    history.push_back({{"generation", gen.generation},
                       {"best_f", gen.best_f},
                       {"mean_f", gen.mean_f},
                       {"best_ever_f", gen.best_ever_f},
                       {"best_genome", gen.best_genome.str()}});
  }
  entry["history"] = history;
  return entry;
}

/// Renders and writes results.json, tables and the generation log from the
/// per-architecture runs of `search` or `baseline`.
void writeRunArtifacts(const ExperimentConfig& cfg, const std::string& kind,
                       const std::vector<ArchRunResult>& runs,
                       std::size_t winnerIndex, bool gaVariant) {
  const fs::path outDir = cfg.out;

  std::map<std::string, EvalRecord> records;
  std::vector<std::string> ids;
  std::vector<ModelProperties> props;
  json models = json::array();
  std::ofstream genLog(outDir / "generations.jsonl",
                       std::ios::binary | std::ios::trunc);
  for (const ArchRunResult& run : runs) {
    const std::string id = run.arch.modelId(gaVariant);
    ids.push_back(id);
    if (!run.best.record) {
      throw ReportingError("no successful evaluation for model " + id);
    }
    records[id] = *run.best.record;
    const auto evals = static_cast<double>(std::max<std::int64_t>(
        run.evaluations, 1));
    const double avgTrain = run.total_train_seconds / evals;
    const double avgPredict = run.total_predict_seconds / evals;
    json entry = archResultJson(id, run);
    entry["avg_t_train_seconds"] = avgTrain;
    entry["avg_t_predict_seconds"] = avgPredict;
    props.push_back({id, run.arch.n_conv_layers, parameterBytes(run.arch),
                     run.size_ratio, avgTrain, run.search_seconds,
                     avgPredict});
    models.push_back(std::move(entry));
    for (const GenerationStats& gen : run.history) {
      genLog << json({{"model_id", id},
                      {"generation", gen.generation},
                      {"best_f", gen.best_f},
                      {"mean_f", gen.mean_f},
                      {"best_genome", gen.best_genome.str()}})
                    .dump()
             << "\n";
    }
  }
  if (!genLog) {
    throw Error("cannot write generation log");
  }
  genLog.close();

  json results;
  results["schema_version"] = kResultsSchemaVersion;
  results["kind"] = kind;
  results["complete"] = true;
  results["config"] = cfg.echoJson();
  results["models"] = std::move(models);
  results["winner"] = winnerSummary(runs[winnerIndex].arch.modelId(gaVariant),
                                    runs[winnerIndex]);
  writeFile(outDir / "results.json", results.dump(2) + "\n");

  const ArchRunResult& winner = runs[winnerIndex];
  std::cout << "winner " << winner.arch.modelId(gaVariant) << " genome "
            << winner.best.genome.str() << " alpha " << winner.best_alpha
            << " (F " << winner.best.fitness << ", S " << winner.size_ratio
            << "); artifacts in " << outDir.string() << "\n";

  const Table comparison = buildComparisonTable(records, ids, cfg.w);
  const Table properties = buildPropertiesTable(props);
  writeFile(outDir / "tables.txt",
            renderText(properties) + "\n" + renderText(comparison));
  writeFile(outDir / "tables.csv",
            "# " + properties.name + "\n" + renderCsv(properties) + "\n# " +
                comparison.name + "\n" + renderCsv(comparison));
  json tablesJson;
  tablesJson["schema_version"] = kResultsSchemaVersion;
  json flat = tableRecords(properties);
  for (auto& rec : tableRecords(comparison)) {
    flat.push_back(rec);
  }
  tablesJson["records"] = std::move(flat);
  writeFile(outDir / "tables.json", tablesJson.dump(2) + "\n");
}

void markIncomplete(const fs::path& outDir, const std::string& kind,
                    const std::exception& e) {
  json results;
  results["schema_version"] = kResultsSchemaVersion;
  results["kind"] = kind;
  results["complete"] = false;
  results["error"] = {{"type", errorKind(e)}, {"message", e.what()}};
  std::ofstream out(outDir / "results.json",
                    std::ios::binary | std::ios::trunc);
  out << results.dump(2) << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void runSearchCommand(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  try {
    const bool surrogate = cfg.evaluator == "surrogate";
    LoadedData data;
    if (!surrogate) {
      data = loadPartitionedData(cfg);
    }

    std::vector<ArchSpec> archs;
    for (const int n : cfg.arch_grid) {
      archs.push_back(archFor(cfg, n));
    }
    const GaConfig ga = gaConfigFor(cfg);
    const MetricAverage average = metricAverageFor(cfg);

    const ArchEvaluatorFactory factory = [&](const ArchSpec& arch) {
      if (surrogate) {
        return makeSurrogateEvaluator(arch, cfg.w);
      }
      return makeTrainingEvaluator(arch, data.train, data.test,
                                   ga.train_config, cfg.w, average,
                                   ga.fitness_metric);
    };

    const CompensatoryResult result =
        runCompensatory(archs, ga, cfg.w, factory);

    if (!surrogate) {
      fs::create_directories(fs::path(cfg.out) / "checkpoints");
      for (const ArchRunResult& run : result.per_arch) {
        const Model<float> model = rebuildTrainedModel(
            run.arch, run.best, data.train, ga.train_config);
        saveCheckpoint(model, fs::path(cfg.out) / "checkpoints" /
                                  (run.arch.modelId(true) + ".ckpt"));
      }
    }
    writeRunArtifacts(cfg, "search", result.per_arch, result.winner_index,
                      /*gaVariant=*/true);
  } catch (const std::exception& e) {
    markIncomplete(cfg.out, "search", e);
    throw;
  }
}

void runBaselineCommand(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  try {
    const bool surrogate = cfg.evaluator == "surrogate";
    LoadedData data;
    if (!surrogate) {
      data = loadPartitionedData(cfg);
    }
    const GaConfig ga = gaConfigFor(cfg);
    const MetricAverage average = metricAverageFor(cfg);

    std::vector<ArchRunResult> runs;
    std::vector<double> alphas;
    std::vector<int> ns;
    for (const int n : cfg.arch_grid) {
      const ArchSpec arch = archFor(cfg, n);
      GaConfig archCfg = ga;
      archCfg.master_seed =
          deriveSeed(ga.master_seed, "arch", static_cast<std::uint64_t>(n));
      const GenomeEvaluator evaluator =
          surrogate ? makeSurrogateEvaluator(arch, cfg.w)
                    : makeTrainingEvaluator(arch, data.train, data.test,
                                            ga.train_config, cfg.w, average,
                                            ga.fitness_metric);
      const auto t0 = std::chrono::steady_clock::now();
      GaResult random = runRandomSelection(
          static_cast<std::size_t>(arch.n_conv_layers), archCfg, evaluator);
      ArchRunResult run;
      run.arch = arch;
      run.size_ratio = sizeRatio(arch.n_conv_layers, arch.reference_layers);
      run.best_alpha = alpha(random.best.fitness, run.size_ratio, cfg.w);
      run.best = std::move(random.best);
      run.history = std::move(random.history);
      run.evaluations = random.evaluations;
      run.total_train_seconds = random.total_train_seconds;
      run.total_predict_seconds = random.total_predict_seconds;
      run.search_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      alphas.push_back(run.best_alpha);
      ns.push_back(n);
      runs.push_back(std::move(run));
    }
    const std::size_t winner = selectWinner(alphas, ns);

    if (!surrogate) {
      fs::create_directories(fs::path(cfg.out) / "checkpoints");
      for (const ArchRunResult& run : runs) {
        const Model<float> model = rebuildTrainedModel(
            run.arch, run.best, data.train, ga.train_config);
        saveCheckpoint(model, fs::path(cfg.out) / "checkpoints" /
                                  (run.arch.modelId(false) + ".ckpt"));
      }
    }
    writeRunArtifacts(cfg, "baseline", runs, winner, /*gaVariant=*/false);
  } catch (const std::exception& e) {
    markIncomplete(cfg.out, "baseline", e);
    throw;
  }
}

void runEnumerateCommand(const ExperimentConfig& cfg) {
  cfg.validate();
  const FunctionSet set = defaultFunctionSet();
  const SearchSpaceSize space =
      searchSpaceSize(static_cast<std::size_t>(cfg.enum_n), set.size());
  if (space.representable) {
    std::cout << space.total << " genomes (" << space.multi_function
              << " multi-function, " << space.single_function
              << " single-function)\n";
  }

  std::function<double(const Genome&)> score;
  LoadedData data;
  if (cfg.evaluator == "surrogate") {
    score = surrogateReluFraction;
  } else {
    data = loadPartitionedData(cfg);
    const ArchSpec arch = archFor(cfg, cfg.enum_n);
    const GaConfig ga = gaConfigFor(cfg);
    const MetricAverage average = metricAverageFor(cfg);
    const GenomeEvaluator evaluator =
        makeTrainingEvaluator(arch, data.train, data.test, ga.train_config,
                              cfg.w, average, ga.fitness_metric);
    const std::uint64_t masterSeed = cfg.seed;
    score = [evaluator, masterSeed](const Genome& g) {
      // One deterministic seed per genome, independent of visit order.
      return evaluator(g, deriveSeed(masterSeed, g.str())).fitness;
    };
  }

  const auto ranked = enumerateRanked(static_cast<std::size_t>(cfg.enum_n),
                                      set, score, cfg.enum_cap);
  fs::create_directories(cfg.out);
  std::ostringstream csv;
  csv << "rank,genome,f\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    csv << (i + 1) << "," << ranked[i].first.str() << "," << ranked[i].second
        << "\n";
  }
  writeFile(fs::path(cfg.out) / "ranked.csv", csv.str());
  std::cout << "best: " << ranked.front().first.str() << " (F = "
            << ranked.front().second << ")\n"
            << "ranking written to "
            << (fs::path(cfg.out) / "ranked.csv").string() << "\n";
}

void runTrainCommand(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.genome.empty()) {
    throw ConfigError("train: --genome is required (e.g. RELU-SIG-TANH-ELU)");
  }
  const Genome genome = Genome::fromString(cfg.genome);
  ExperimentConfig adjusted = cfg;
  // The genome fixes the depth.
  const int n = static_cast<int>(genome.size());
  if (n > cfg.reference_m) {
    throw ConfigError("train: genome longer than reference_m");
  }
  const ArchSpec arch = archFor(adjusted, n);
  const LoadedData data = loadPartitionedData(cfg);
  const GaConfig ga = gaConfigFor(cfg);

  const EvalOutcome outcome = evaluateByTraining(
      arch, genome, data.train, data.test, ga.train_config, cfg.w,
      metricAverageFor(cfg), ga.fitness_metric, cfg.seed);

  fs::create_directories(cfg.out);
  Individual asIndividual;
  asIndividual.genome = genome;
  asIndividual.eval_seed = cfg.seed;
  const Model<float> model =
      rebuildTrainedModel(arch, asIndividual, data.train, ga.train_config);
  saveCheckpoint(model,
                 fs::path(cfg.out) / (arch.modelId(false) + "_train.ckpt"));

  json result;
  result["schema_version"] = kResultsSchemaVersion;
  result["kind"] = "train";
  result["model_id"] = arch.modelId(false);
  result["genome"] = genome.str();
  result["fitness"] = outcome.fitness;
  result["record"] = toJson(*outcome.record);
  writeFile(fs::path(cfg.out) / "train_result.json", result.dump(2) + "\n");
  std::cout << result.dump(2) << "\n";
}

void runReportCommand(const std::vector<fs::path>& resultsFiles,
                      const std::string& out) {
  if (resultsFiles.empty()) {
    throw ConfigError("report: no results files given");
  }
  std::map<std::string, EvalRecord> records;
  std::vector<std::string> ids;
  std::vector<ModelProperties> props;
  bool haveW = false;
  double w = 0.7;
  for (const fs::path& file : resultsFiles) {
    std::ifstream in(file);
    if (!in) {
      throw FormatError("report: cannot open " + file.string());
    }
    json results;
    try {
      in >> results;
    } catch (const json::exception& e) {
      throw FormatError("report: " + file.string() + " is not JSON: " +
                        e.what());
    }
    if (!results.contains("schema_version") ||
        !results["schema_version"].is_number_integer() ||
        results["schema_version"].get<int>() != kResultsSchemaVersion) {
      throw FormatError("report: " + file.string() +
                        " has unsupported schema_version (expected " +
                        std::to_string(kResultsSchemaVersion) + ")");
    }
    if (results.value("complete", false) == false) {
      throw ReportingError("report: " + file.string() +
                           " is flagged incomplete");
    }
    const double fileW = results.at("config").at("fitness.w").get<double>();
    if (haveW && fileW != w) {
      throw ReportingError(
          "report: results files use different fitness.w values");
    }
    w = fileW;
    haveW = true;
    for (const json& model : results.at("models")) {
      const auto id = model.at("model_id").get<std::string>();
      if (records.count(id) != 0) {
        throw ReportingError("report: duplicate model " + id);
      }
      if (model.at("record").is_null()) {
        throw ReportingError("report: model " + id + " has no record");
      }
      records[id] = evalRecordFromJson(model.at("record"));
      ids.push_back(id);
      props.push_back(
          {id, model.at("n_conv_layers").get<int>(),
           model.at("param_bytes").get<std::int64_t>(),
           model.at("size_ratio").get<double>(),
           model.value("avg_t_train_seconds", 0.0),
           model.value("t_search_seconds", 0.0),
           model.value("avg_t_predict_seconds", 0.0)});
    }
  }
  ids = canonicalModelOrder(ids);
  std::sort(props.begin(), props.end(),
            [&](const ModelProperties& a, const ModelProperties& b) {
              const auto pos = [&](const std::string& id) {
                return std::find(ids.begin(), ids.end(), id) - ids.begin();
              };
              return pos(a.model_id) < pos(b.model_id);
            });

  const Table comparison = buildComparisonTable(records, ids, w);
  const Table properties = buildPropertiesTable(props);
  const std::string text =
      renderText(properties) + "\n" + renderText(comparison);
  if (out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(out);
  writeFile(fs::path(out) / "tables.txt", text);
  writeFile(fs::path(out) / "tables.csv",
            "# " + properties.name + "\n" + renderCsv(properties) + "\n# " +
                comparison.name + "\n" + renderCsv(comparison));
  json tablesJson;
  tablesJson["schema_version"] = kResultsSchemaVersion;
  json flat = tableRecords(properties);
  for (auto& rec : tableRecords(comparison)) {
    flat.push_back(rec);
  }
  tablesJson["records"] = std::move(flat);
  writeFile(fs::path(out) / "tables.json", tablesJson.dump(2) + "\n");
}

}  // namespace cmcnn
