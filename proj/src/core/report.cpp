// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "error.hpp"

namespace vf {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw Error(errc::argument, "table '" + name + "': row width mismatch");
  }
  if (!label_column.empty()) {
    throw Error(errc::argument, "table '" + name + "': label required");
  }
  rows.push_back(std::move(row));
}

void Table::add_row(std::string label, std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw Error(errc::argument, "table '" + name + "': row width mismatch");
  }
  if (label_column.empty()) {
    throw Error(errc::argument, "table '" + name + "': table has no label column");
  }
  labels.push_back(std::move(label));
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& col) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == col) {
      std::vector<double> v(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) v[r] = rows[r][c];
      return v;
    }
  }
  throw Error(errc::argument, "table '" + name + "': no column '" + col + "'");
}

const Table* Report::find(const std::string& table_name) const {
  for (const auto& t : tables) {
    if (t.name == table_name) return &t;
  }
  return nullptr;
}

std::string config_hash_hex(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json table_to_json(const Table& t) {
  nlohmann::json j;
  j["name"] = t.name;
  if (!t.label_column.empty()) {
    j["label_column"] = t.label_column;
    j["labels"] = t.labels;
  }
  j["columns"] = t.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) {
      if (std::isnan(v)) {
        r.push_back(nullptr);
      } else {
        r.push_back(v);
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

Table table_from_json(const nlohmann::json& j) {
  Table t;
  t.name = j.at("name").get<std::string>();
  if (j.contains("label_column")) {
    t.label_column = j.at("label_column").get<std::string>();
    t.labels = j.at("labels").get<std::vector<std::string>>();
  }
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& v : row) {
      r.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace

void write_table_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(errc::io, "cannot open '" + path.string() + "' for writing");
  bool first = true;
  if (!table.label_column.empty()) {
    f << table.label_column;
    first = false;
  }
  for (const auto& c : table.columns) {
    if (!first) f << ',';
    f << c;
    first = false;
  }
  f << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    first = true;
    if (!table.label_column.empty()) {
      f << table.labels[r];
      first = false;
    }
    for (double v : table.rows[r]) {
      if (!first) f << ',';
      f << format_value(v);
      first = false;
    }
    f << '\n';
  }
  if (!f) throw Error(errc::io, "write failed for '" + path.string() + "'");
}

std::filesystem::path write_report(const Report& report, const std::filesystem::path& out_dir) {
  const auto dir = out_dir / report.name;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(errc::io, "cannot create directory '" + dir.string() + "'");

  nlohmann::json j;
  j["name"] = report.name;
  j["config_hash"] = report.config_hash;
  j["config"] = report.config;
  j["summary"] = report.summary;
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : report.tables) tables.push_back(table_to_json(t));
  j["tables"] = std::move(tables);

  std::ofstream f(dir / "report.json", std::ios::binary);
  if (!f) throw Error(errc::io, "cannot open report.json for writing in '" + dir.string() + "'");
  f << j.dump(2) << '\n';
  if (!f) throw Error(errc::io, "write failed for report.json in '" + dir.string() + "'");

  for (const auto& t : report.tables) {
    write_table_csv(t, dir / (t.name + ".csv"));
  }
  return dir;
}

Report read_report(const std::filesystem::path& report_json) {
  std::ifstream f(report_json, std::ios::binary);
  if (!f) throw Error(errc::io, "cannot open '" + report_json.string() + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw Error(errc::io, "'" + report_json.string() + "': " + e.what());
  }
  Report r;
  try {
    r.name = j.at("name").get<std::string>();
    r.config_hash = j.value("config_hash", "");
    r.config = j.value("config", nlohmann::json::object());
    r.summary = j.value("summary", nlohmann::json::object());
    for (const auto& t : j.value("tables", nlohmann::json::array())) {
      r.tables.push_back(table_from_json(t));
    }
  } catch (const std::exception& e) {
    throw Error(errc::io, "'" + report_json.string() + "': " + e.what());
  }
  return r;
}

}  // namespace vf
