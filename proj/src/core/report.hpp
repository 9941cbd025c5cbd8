// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace vf {

/// Rectangular numeric table with an optional leading label column.
/// Table names double as artifact file stems; dotted prefixes select the plot
/// style (curves. / scatter. / box. / trend. / table.).
struct Table {
  std::string name;
  std::string label_column;  // empty -> purely numeric table
  std::vector<std::string> columns;
  std::vector<std::string> labels;  // one per row when label_column is set
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void add_row(std::string label, std::vector<double> row);
  std::vector<double> column(const std::string& name) const;
  bool empty() const { return rows.empty(); }
};

struct Report {
  std::string name;
  std::string config_hash;  // hex FNV-1a of the canonical config dump
  nlohmann::json config;
  nlohmann::json summary;
  std::vector<Table> tables;

  const Table* find(const std::string& name) const;
};

std::string config_hash_hex(const nlohmann::json& config);

/// Writes <out_dir>/<report.name>/report.json plus one CSV per table.
/// Returns the directory written.
std::filesystem::path write_report(const Report& report, const std::filesystem::path& out_dir);

Report read_report(const std::filesystem::path& report_json);

void write_table_csv(const Table& table, const std::filesystem::path& path);

}  // namespace vf
