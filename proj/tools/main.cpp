// cmcnn: search for compressed multi-function CNNs with a genetic algorithm.
//
// Subcommands:
//   search     GA over activation-function strings per architecture, then
//              compensatory selection of the best architecture
//   baseline   random model selection at the same evaluation budget
//   enumerate  exhaustive scoring of the whole genome space (capped)
//   train      train one fixed genome (debugging aid)
//   report     re-render tables from saved results.json files

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmcnn/errors.hpp"
#include "cmcnn/experiment.hpp"

namespace {

// Registers the flags shared by search/baseline/enumerate/train. Flags only
// overwrite `cfg` fields when actually passed, so the precedence is
// defaults < config file < command line.
void addCommonOptions(CLI::App& cmd, cmcnn::ExperimentConfig& cfg,
                      std::string& configPath) {
  cmd.add_option("--config", configPath,
                 "Config file with flat dotted keys (key = value)");
  cmd.add_option("--data-dir", cfg.data_dir,
                 "Directory with the CIFAR-10 binary batches "
                 "(data.dir; env CMCNN_DATA_DIR)");
  cmd.add_option("--partition", cfg.partition,
                 "Data partition method: first|second (data.partition)");
  cmd.add_option("--n-train", cfg.n_train,
                 "Training samples to take (data.n_train)");
  cmd.add_option("--n-test", cfg.n_test, "Test samples to take (data.n_test)");
  cmd.add_option_function<std::string>(
      "--arch-grid",
      [&cfg](const std::string& text) {
        cfg.arch_grid = cmcnn::parseArchGrid(text);
      },
      "Comma-separated conv-layer counts, e.g. 4,6,8,10 (arch.grid)");
  cmd.add_option("--reference-m", cfg.reference_m,
                 "Reference layer count m for the size ratio "
                 "(arch.reference_m)");
  cmd.add_option("--base-channels", cfg.base_channels,
                 "Channels of the first conv stage (arch.base_channels)");
  cmd.add_option("--w", cfg.w, "Compensatory weight w (fitness.w)");
  cmd.add_option("--fitness", cfg.fitness,
                 "GA fitness: train_f1|test_f1 (fitness.metric)");
  cmd.add_option("--population", cfg.population,
                 "GA population size N, even (ga.population)");
  cmd.add_option("--generations", cfg.generations,
                 "GA generations M (ga.generations)");
  cmd.add_option("--mutation-prob", cfg.mutation_prob,
                 "Per-child mutation probability (ga.mutation_prob)");
  cmd.add_option("--selection", cfg.selection,
                 "Parent selection: roulette|uniform (ga.selection)");
  cmd.add_option("--epochs", cfg.epochs,
                 "Training epochs per evaluation (train.epochs)");
  cmd.add_option("--batch-size", cfg.batch_size,
                 "SGD mini-batch size (train.batch_size)");
  cmd.add_option("--learning-rate", cfg.learning_rate,
                 "SGD learning rate (train.learning_rate)");
  cmd.add_option("--momentum", cfg.momentum,
                 "SGD momentum (train.momentum)");
  cmd.add_option("--metric-average", cfg.metric_average,
                 "F1 averaging: macro|micro (metrics.average)");
  cmd.add_option("--seed", cfg.seed, "Master RNG seed (run.seed)");
  cmd.add_option("--jobs", cfg.jobs,
                 "Parallel fitness evaluations; results are identical for "
                 "any value (run.jobs)");
  cmd.add_option("--out", cfg.out, "Output directory (run.out)");
  cmd.add_option("--evaluator", cfg.evaluator,
                 "Genome evaluator: train|surrogate (run.evaluator)");
}

/// First pass: pull --config out of argv so file values are applied before
/// CLI11 parses (and thus overrides) the rest.
std::string findConfigArg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      return argv[i + 1];
    }
    if (arg.rfind("--config=", 0) == 0) {
      return arg.substr(9);
    }
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed multi-function CNN search"};
  app.require_subcommand(1);

  cmcnn::ExperimentConfig cfg;
  std::string configPath;
  app.add_option("--config", configPath,
                 "Config file with flat dotted keys (key = value)");

  try {
    const std::string preConfig = findConfigArg(argc, argv);
    if (!preConfig.empty()) {
      cfg.applyFile(preConfig);
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json(
                     {{"error",
                       {{"type", cmcnn::errorKind(e)}, {"message", e.what()}}}})
                     .dump()
              << "\n";
    return 1;
  }

  CLI::App* search = app.add_subcommand(
      "search", "GA + compensatory selection over the architecture grid");
  addCommonOptions(*search, cfg, configPath);

  CLI::App* baseline = app.add_subcommand(
      "baseline", "Random model selection at the GA's evaluation budget");
  addCommonOptions(*baseline, cfg, configPath);

  CLI::App* enumerateCmd = app.add_subcommand(
      "enumerate", "Score every genome of the m^n space (within the cap)");
  addCommonOptions(*enumerateCmd, cfg, configPath);
  enumerateCmd->add_option("--n", cfg.enum_n,
                           "Genome length to enumerate (enumerate.n)");
  enumerateCmd->add_option("--cap", cfg.enum_cap,
                           "Maximum space size to enumerate (enumerate.cap)");

  CLI::App* trainCmd =
      app.add_subcommand("train", "Train a single fixed genome");
  addCommonOptions(*trainCmd, cfg, configPath);
  trainCmd->add_option("--genome", cfg.genome,
                       "Hyphenated genome, e.g. RELU-SIG-TANH-ELU "
                       "(train.genome)");

  CLI::App* report =
      app.add_subcommand("report", "Render tables from results.json files");
  std::vector<std::string> resultFiles;
  std::string reportOut;
  report->add_option("results", resultFiles, "results.json files")
      ->required();
  report->add_option("--out", reportOut,
                     "Output directory (default: print to stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (search->parsed()) {
      cmcnn::runSearchCommand(cfg);
    } else if (baseline->parsed()) {
      cmcnn::runBaselineCommand(cfg);
    } else if (enumerateCmd->parsed()) {
      cmcnn::runEnumerateCommand(cfg);
    } else if (trainCmd->parsed()) {
      cmcnn::runTrainCommand(cfg);
    } else if (report->parsed()) {
      std::vector<std::filesystem::path> files(resultFiles.begin(),
                                               resultFiles.end());
      cmcnn::runReportCommand(files, reportOut);
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json(
                     {{"error",
                       {{"type", cmcnn::errorKind(e)}, {"message", e.what()}}}})
                     .dump()
              << "\n";
    return 1;
  }
  return 0;
}
