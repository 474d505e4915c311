#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace roto::harness {

// One CSV row: values in column order. NaN is written as "nan" and marks a
// quantity not measured in this row.
struct MetricsRow {
  std::vector<double> values;
};

// Append-only metrics CSV. The header is written when the file is created;
// reopening an existing file checks the header instead. Every row is flushed.
// The first column must be the global step and strictly increase.
class MetricsLog {
 public:
  MetricsLog() = default;
  MetricsLog(const std::string& path, std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  void append(const MetricsRow& row);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<std::string> columns_;
  std::ofstream out_;
  double last_step_ = -1.0;
  bool has_rows_ = false;
};

struct MetricsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 if absent
};

MetricsTable read_metrics(const std::string& path);
// Drops rows whose first column exceeds max_step (used when resuming).
void truncate_metrics(const std::string& path, double max_step);

std::string format_value(double v);

}  // namespace roto::harness
