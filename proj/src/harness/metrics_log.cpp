#include "roto/harness/metrics_log.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace roto::harness {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s;
}

double parse_value(const std::string& s) {
  if (s == "nan") return std::nan("");
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("metrics: malformed value '" + s + "'");
  return v;
}

}  // namespace

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MetricsLog::MetricsLog(const std::string& path, std::vector<std::string> columns)
    : path_(path), columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("MetricsLog: no columns");
  const bool exists = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  if (exists) {
    const MetricsTable t = read_metrics(path);
    if (t.columns != columns_) throw std::runtime_error("MetricsLog: existing header in '" + path + "' differs");
    if (!t.rows.empty()) {
      last_step_ = t.rows.back()[0];
      has_rows_ = true;
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw std::runtime_error("MetricsLog: cannot open '" + path + "' for writing");
  if (!exists) {
    out_ << join(columns_) << '\n';
    out_.flush();
  }
}

void MetricsLog::append(const MetricsRow& row) {
  if (row.values.size() != columns_.size()) throw std::invalid_argument("MetricsLog: row width differs from header");
  if (has_rows_ && !(row.values[0] > last_step_)) {
    throw std::logic_error("MetricsLog: step column must strictly increase");
  }
  std::vector<std::string> cells;
  cells.reserve(row.values.size());
  for (double v : row.values) cells.push_back(format_value(v));
  out_ << join(cells) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("MetricsLog: write to '" + path_ + "' failed");
  last_step_ = row.values[0];
  has_rows_ = true;
}

int MetricsTable::column(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

MetricsTable read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file '" + path + "'");
  MetricsTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.columns = split(line);
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": row width differs from header");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_value(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void truncate_metrics(const std::string& path, double max_step) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  std::string header, line, kept;
  if (!std::getline(in, header)) return;
  kept = header + '\n';
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (!cells.empty() && parse_value(cells[0]) <= max_step) kept += line + '\n';
  }
  in.close();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << kept;
    if (!out) throw std::runtime_error("cannot rewrite metrics file '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace roto::harness
