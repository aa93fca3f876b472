#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "cmcnn/data.hpp"
#include "cmcnn/experiment.hpp"
#include "cmcnn/report.hpp"
#include "cmcnn/rng.hpp"

using namespace cmcnn;

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path freshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cmcnn_exp_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fileText(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// A small but loadable archive (full wire format, random pixels) shared by
/// the command tests; built once.
const fs::path& sharedArchive() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "cmcnn_exp_archive";
    bool complete = fs::exists(d / "test_batch.bin");
    for (int b = 1; complete && b <= 5; ++b) {
      complete = fs::exists(d / ("data_batch_" + std::to_string(b) + ".bin"));
    }
    if (!complete) {
      fs::create_directories(d);
      RngStream rng(8888);
      for (const std::string name :
           {"data_batch_1.bin", "data_batch_2.bin", "data_batch_3.bin",
            "data_batch_4.bin", "data_batch_5.bin", "test_batch.bin"}) {
        std::vector<RawCifarRecord> records(kCifarRecordsPerBatch);
        for (std::size_t i = 0; i < records.size(); ++i) {
          records[i].label = static_cast<std::uint8_t>(i % 10);
          for (auto& byte : records[i].pixels) {
            byte = static_cast<std::uint8_t>(rng.nextBelow(256));
          }
        }
        writeCifar10Batch(d / name, records);
      }
    }
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("config keys parse and validate") {
  ExperimentConfig cfg;
  cfg.applyKey("data.partition", "second");
  cfg.applyKey("data.n_train", "1234");
  cfg.applyKey("arch.grid", "2,4");
  cfg.applyKey("fitness.w", "0.5");
  cfg.applyKey("ga.population", "6");
  cfg.applyKey("run.seed", "99");
  cfg.applyKey("run.evaluator", "surrogate");
  CHECK(cfg.partition == "second");
  CHECK(cfg.n_train == 1234);
  CHECK(cfg.arch_grid == std::vector<int>{2, 4});
  CHECK(cfg.w == 0.5);
  CHECK(cfg.population == 6);
  CHECK(cfg.seed == 99);
  cfg.validate();

  CHECK_THROWS_AS(cfg.applyKey("no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.applyKey("data.n_train", "abc"), ConfigError);

  cfg.applyKey("data.partition", "third");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config files use flat dotted keys with comments") {
  const fs::path dir = freshDir("config_file");
  const fs::path file = dir / "run.conf";
  std::ofstream out(file);
  out << "# experiment knobs\n"
      << "arch.grid = 4,6\n"
      << "ga.generations = 2   # short run\n"
      << "\n"
      << "run.evaluator = surrogate\n";
  out.close();

  ExperimentConfig cfg;
  cfg.applyFile(file);
  CHECK(cfg.arch_grid == std::vector<int>{4, 6});
  CHECK(cfg.generations == 2);
  CHECK(cfg.evaluator == "surrogate");

  std::ofstream bad(file);
  bad << "not a key value line\n";
  bad.close();
  ExperimentConfig cfg2;
  CHECK_THROWS_AS(cfg2.applyFile(file), ConfigError);
}

TEST_CASE("arch grid parsing") {
  CHECK(parseArchGrid("4,6,8,10") == std::vector<int>{4, 6, 8, 10});
  CHECK(parseArchGrid("7") == std::vector<int>{7});
  CHECK_THROWS_AS(parseArchGrid("4,x"), ConfigError);
  CHECK_THROWS_AS(parseArchGrid(""), ConfigError);
}

TEST_CASE("search with one architecture and M = 0 is a random-init report") {
  const fs::path dir = freshDir("m0_search");
  ExperimentConfig cfg;
  cfg.evaluator = "surrogate";
  cfg.arch_grid = {4};
  cfg.generations = 0;
  cfg.seed = 17;
  cfg.out = dir.string();
  runSearchCommand(cfg);

  const json results = json::parse(fileText(dir / "results.json"));
  REQUIRE(results.at("models").size() == 1);
  const json& model = results.at("models")[0];
  CHECK(model.at("model_id") == "CM4_GA");
  CHECK(model.at("evaluations") == 4);
  CHECK(model.at("history").size() == 1);
  CHECK(results.at("winner").at("model_id") == "CM4_GA");
}

TEST_CASE("baseline uses the N*(M+1) budget and emits plain model ids") {
  const fs::path dir = freshDir("baseline");
  ExperimentConfig cfg;
  cfg.evaluator = "surrogate";
  cfg.arch_grid = {4, 6};
  cfg.generations = 3;
  cfg.population = 4;
  cfg.seed = 5;
  cfg.out = dir.string();
  runBaselineCommand(cfg);

  const json results = json::parse(fileText(dir / "results.json"));
  CHECK(results.at("kind") == "baseline");
  for (const json& model : results.at("models")) {
    CHECK(model.at("evaluations") == 16);  // 4 * (3 + 1)
    const std::string id = model.at("model_id").get<std::string>();
    CHECK(id.find("_GA") == std::string::npos);
  }

  SUBCASE("seeded rerun is identical up to timing") {
    const fs::path dir2 = freshDir("baseline_rerun");
    ExperimentConfig cfg2 = cfg;
    cfg2.out = dir2.string();
    runBaselineCommand(cfg2);
    const json a = json::parse(fileText(dir / "results.json"));
    const json b = json::parse(fileText(dir2 / "results.json"));
    CHECK(scrubTimingFields(a).dump() == scrubTimingFields(b).dump());
  }
}

TEST_CASE("enumerate writes the complete descending ranking") {
  const fs::path dir = freshDir("enumerate");
  ExperimentConfig cfg;
  cfg.evaluator = "surrogate";
  cfg.enum_n = 4;
  cfg.out = dir.string();
  runEnumerateCommand(cfg);

  const std::string csv = fileText(dir / "ranked.csv");
  std::size_t lines = 0;
  for (const char c : csv) {
    lines += c == '\n' ? 1 : 0;
  }
  CHECK(lines == 257);  // header + 256 genomes
  CHECK(csv.rfind("rank,genome,f\n", 0) == 0);
  CHECK(csv.find("1,RELU-RELU-RELU-RELU,1\n") != std::string::npos);

  SUBCASE("spaces over the cap are refused") {
    ExperimentConfig big = cfg;
    big.enum_n = 10;
    CHECK_THROWS_AS(runEnumerateCommand(big), SearchSpaceError);
  }
}

TEST_CASE("train subcommand trains one genome end to end") {
  const fs::path dir = freshDir("train_cmd");
  ExperimentConfig cfg;
  cfg.data_dir = sharedArchive().string();
  cfg.genome = "RELU-SIG";
  cfg.n_train = 64;
  cfg.n_test = 32;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  cfg.out = dir.string();
  runTrainCommand(cfg);

  CHECK(fs::exists(dir / "CM2_train.ckpt"));
  const json result = json::parse(fileText(dir / "train_result.json"));
  CHECK(result.at("kind") == "train");
  CHECK(result.at("model_id") == "CM2");
  CHECK(result.at("genome") == "RELU-SIG");
  CHECK(result.at("record").at("size_ratio") == 0.2);

  ExperimentConfig missing = cfg;
  missing.genome.clear();
  CHECK_THROWS_AS(runTrainCommand(missing), ConfigError);
}

TEST_CASE("the data directory falls back to CMCNN_DATA_DIR") {
  const fs::path dir = freshDir("env_fallback");
  setenv("CMCNN_DATA_DIR", sharedArchive().string().c_str(), 1);
  ExperimentConfig cfg;
  cfg.genome = "RELU";
  cfg.n_train = 32;
  cfg.n_test = 16;
  cfg.epochs = 1;
  cfg.out = dir.string();
  runTrainCommand(cfg);  // no data_dir set; env must be honored
  unsetenv("CMCNN_DATA_DIR");
  CHECK(fs::exists(dir / "CM1_train.ckpt"));
}

TEST_CASE("search on real training data produces checkpoints") {
  const fs::path dir = freshDir("tiny_train_search");
  ExperimentConfig cfg;
  cfg.data_dir = sharedArchive().string();
  cfg.arch_grid = {1, 2};
  cfg.reference_m = 10;
  cfg.n_train = 48;
  cfg.n_test = 24;
  cfg.population = 2;
  cfg.generations = 1;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  cfg.seed = 2;
  cfg.out = dir.string();
  runSearchCommand(cfg);

  CHECK(fs::exists(dir / "checkpoints" / "CM1_GA.ckpt"));
  CHECK(fs::exists(dir / "checkpoints" / "CM2_GA.ckpt"));
  const json results = json::parse(fileText(dir / "results.json"));
  CHECK(results.at("models").size() == 2);
  // Real-training records carry timings; alphas still recompute exactly.
  for (const json& model : results.at("models")) {
    const double f1 = model.at("record").at("f1_train").get<double>();
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);
  }

  SUBCASE("parallel evaluation reproduces the jobs=1 run bit for bit") {
    const fs::path dir2 = freshDir("tiny_train_search_jobs2");
    ExperimentConfig parallel = cfg;
    parallel.jobs = 2;
    parallel.out = dir2.string();
    runSearchCommand(parallel);
    const json a = json::parse(fileText(dir / "results.json"));
    const json b = json::parse(fileText(dir2 / "results.json"));
    CHECK(scrubTimingFields(a).dump() == scrubTimingFields(b).dump());
    CHECK(fileText(dir / "checkpoints" / "CM2_GA.ckpt") ==
          fileText(dir2 / "checkpoints" / "CM2_GA.ckpt"));
  }
}

TEST_CASE("duplicate arch grid entries are rejected") {
  ExperimentConfig cfg;
  cfg.arch_grid = {4, 6, 4};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
