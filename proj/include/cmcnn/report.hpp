#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmcnn/eval_record.hpp"

namespace cmcnn {

struct TableCell {
  double value = 0.0;
  bool best = false;
};

struct TableRow {
  std::string metric;
  int decimals = 3;
  std::vector<TableCell> cells;  // one per model column
};

struct Table {
  std::string name;
  std::vector<std::string> model_ids;  // column order
  std::vector<TableRow> rows;
};

/// The model-comparison table: rows F1_train, F1_test, Fit_train, Fit_test.
/// The Fit rows are recomputed from each record's F1 and S; stored alphas
/// are never trusted. Every per-row maximum is flagged (including ties).
Table buildComparisonTable(const std::map<std::string, EvalRecord>& records,
                           const std::vector<std::string>& modelIds, double w);

struct ModelProperties {
  std::string model_id;
  int n_conv_layers = 0;
  std::int64_t param_bytes = 0;
  double size_ratio = 0.0;
  double avg_t_train_seconds = 0.0;
  double t_search_seconds = 0.0;  // whole search for this architecture
  double avg_t_predict_seconds = 0.0;
};

/// Architecture properties: layer count, size in KB (param_bytes/1024,
/// rounded), S, and both the per-model average and whole-search timings.
Table buildPropertiesTable(const std::vector<ModelProperties>& props);

std::string renderText(const Table& table);
std::string renderCsv(const Table& table);

/// Flat records: {table, metric, model_id, value, flagged_best}.
nlohmann::json tableRecords(const Table& table);

/// Canonical column order: ascending layer count, GA variant first.
std::vector<std::string> canonicalModelOrder(std::vector<std::string> ids);

/// Removes every wall-clock field, recursively; used by the determinism
/// comparison ("identical excluding timing fields").
nlohmann::json scrubTimingFields(nlohmann::json value);

nlohmann::json toJson(const EvalRecord& rec);
EvalRecord evalRecordFromJson(const nlohmann::json& j);

}  // namespace cmcnn
