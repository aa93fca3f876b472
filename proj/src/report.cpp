#include "cmcnn/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmcnn/compensatory.hpp"
#include "cmcnn/errors.hpp"

namespace cmcnn {

namespace {

void flagRowMaxima(TableRow& row) {
  if (row.cells.empty()) {
    return;
  }
  double best = row.cells.front().value;
  for (const TableCell& cell : row.cells) {
    best = std::max(best, cell.value);
  }
  for (TableCell& cell : row.cells) {
    cell.best = (cell.value == best);
  }
}

std::string formatValue(double value, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << value;
  return out.str();
}

}  // namespace

Table buildComparisonTable(const std::map<std::string, EvalRecord>& records,
                           const std::vector<std::string>& modelIds,
                           double w) {
  if (modelIds.empty()) {
    throw ReportingError("comparison table: no models requested");
  }
  Table table;
  table.name = "Model comparisons";
  table.model_ids = modelIds;
  table.rows = {{"F1_train", 3, {}},
                {"F1_test", 3, {}},
                {"Fit_train", 3, {}},
                {"Fit_test", 3, {}}};
  for (const std::string& id : modelIds) {
    const auto it = records.find(id);
    if (it == records.end()) {
      throw ReportingError("comparison table: missing record for model " + id);
    }
    const EvalRecord& rec = it->second;
    table.rows[0].cells.push_back({rec.f1_train, false});
    table.rows[1].cells.push_back({rec.f1_test, false});
    table.rows[2].cells.push_back({alpha(rec.f1_train, rec.size_ratio, w), false});
    table.rows[3].cells.push_back({alpha(rec.f1_test, rec.size_ratio, w), false});
  }
  for (TableRow& row : table.rows) {
    flagRowMaxima(row);
  }
  return table;
}

Table buildPropertiesTable(const std::vector<ModelProperties>& props) {
  if (props.empty()) {
    throw ReportingError("properties table: no models");
  }
  Table table;
  table.name = "Properties of models";
  table.rows = {{"No. of CLs", 0, {}},
                {"Model Size (KB)", 0, {}},
                {"S", 1, {}},
                {"Avg T_train (s)", 2, {}},
                {"Total T_search (s)", 2, {}},
                {"Avg T_predict (s)", 2, {}}};
  for (const ModelProperties& p : props) {
    table.model_ids.push_back(p.model_id);
    table.rows[0].cells.push_back({static_cast<double>(p.n_conv_layers), false});
    table.rows[1].cells.push_back(
        {static_cast<double>(std::llround(static_cast<double>(p.param_bytes) / 1024.0)),
         false});
    table.rows[2].cells.push_back({p.size_ratio, false});
    table.rows[3].cells.push_back({p.avg_t_train_seconds, false});
    table.rows[4].cells.push_back({p.t_search_seconds, false});
    table.rows[5].cells.push_back({p.avg_t_predict_seconds, false});
  }
  return table;
}

std::string renderText(const Table& table) {
  // Column widths: metric label column, then one column per model.
  std::size_t label = 0;
  for (const TableRow& row : table.rows) {
    label = std::max(label, row.metric.size());
  }
  std::vector<std::size_t> widths(table.model_ids.size());
  for (std::size_t c = 0; c < table.model_ids.size(); ++c) {
    widths[c] = table.model_ids[c].size();
    for (const TableRow& row : table.rows) {
      std::string text = formatValue(row.cells[c].value, row.decimals);
      if (row.cells[c].best) {
        text += "*";
      }
      widths[c] = std::max(widths[c], text.size());
    }
  }

  std::ostringstream out;
  out << table.name << "\n";
  out << std::string(label, ' ');
  for (std::size_t c = 0; c < table.model_ids.size(); ++c) {
    out << "  " << std::string(widths[c] - table.model_ids[c].size(), ' ')
        << table.model_ids[c];
  }
  out << "\n";
  for (const TableRow& row : table.rows) {
    out << row.metric << std::string(label - row.metric.size(), ' ');
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      std::string text = formatValue(row.cells[c].value, row.decimals);
      if (row.cells[c].best) {
        text += "*";
      }
      out << "  " << std::string(widths[c] - text.size(), ' ') << text;
    }
    out << "\n";
  }
  return out.str();
}

std::string renderCsv(const Table& table) {
  std::ostringstream out;
  out << "metric";
  for (const std::string& id : table.model_ids) {
    out << "," << id;
  }
  out << "\n";
  for (const TableRow& row : table.rows) {
    out << row.metric;
    for (const TableCell& cell : row.cells) {
      out << "," << formatValue(cell.value, row.decimals);
      if (cell.best) {
        out << "*";
      }
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::json tableRecords(const Table& table) {
  nlohmann::json records = nlohmann::json::array();
  for (const TableRow& row : table.rows) {
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      records.push_back({{"table", table.name},
                         {"metric", row.metric},
                         {"model_id", table.model_ids[c]},
                         {"value", row.cells[c].value},
                         {"flagged_best", row.cells[c].best}});
    }
  }
  return records;
}

std::vector<std::string> canonicalModelOrder(std::vector<std::string> ids) {
  const auto key = [](const std::string& id) {
    // "CM4_GA" -> (4, 0); "CM4" -> (4, 1); "M10" -> (10, 1).
    int n = 0;
    for (const char c : id) {
      if (c >= '0' && c <= '9') {
        n = n * 10 + (c - '0');
      }
    }
    const bool ga = id.size() >= 3 && id.ends_with("_GA");
    return std::pair<int, int>(n, ga ? 0 : 1);
  };
  std::sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) {
    return key(a) < key(b) || (key(a) == key(b) && a < b);
  });
  return ids;
}

nlohmann::json scrubTimingFields(nlohmann::json value) {
  static const std::vector<std::string> kTimingKeys = {
      "t_train_seconds",     "t_predict_seconds",      "t_search_seconds",
      "avg_t_train_seconds", "avg_t_predict_seconds",  "total_train_seconds",
      "total_predict_seconds"};
  if (value.is_object()) {
    for (const std::string& key : kTimingKeys) {
      value.erase(key);
    }
    for (auto& [key, child] : value.items()) {
      child = scrubTimingFields(child);
    }
  } else if (value.is_array()) {
    for (auto& child : value) {
      child = scrubTimingFields(child);
    }
  }
  return value;
}

nlohmann::json toJson(const EvalRecord& rec) {
  return {{"f1_train", rec.f1_train},
          {"f1_test", rec.f1_test},
          {"size_ratio", rec.size_ratio},
          {"alpha_train", rec.alpha_train},
          {"alpha_test", rec.alpha_test},
          {"w", rec.w},
          {"t_train_seconds", rec.t_train_seconds},
          {"t_predict_seconds", rec.t_predict_seconds},
          {"param_bytes", rec.param_bytes}};
}

EvalRecord evalRecordFromJson(const nlohmann::json& j) {
  EvalRecord rec;
  rec.f1_train = j.at("f1_train").get<double>();
  rec.f1_test = j.at("f1_test").get<double>();
  rec.size_ratio = j.at("size_ratio").get<double>();
  rec.alpha_train = j.at("alpha_train").get<double>();
  rec.alpha_test = j.at("alpha_test").get<double>();
  rec.w = j.at("w").get<double>();
  rec.t_train_seconds = j.value("t_train_seconds", 0.0);
  rec.t_predict_seconds = j.value("t_predict_seconds", 0.0);
  rec.param_bytes = j.at("param_bytes").get<std::int64_t>();
  return rec;
}

}  // namespace cmcnn
