// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rkky/errors.hpp"

namespace rkky {

namespace {

CsvRow split(const std::string& line) {
  CsvRow cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

void write_row(std::ostream& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
  out << '\n';
}

void write_head(std::ostream& out, const CsvTable& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  write_row(out, table.columns);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!have_columns && line.starts_with("#")) {
      table.comments.push_back(line.size() > 2 ? line.substr(2) : std::string{});
      continue;
    }
    if (!have_columns) {
      table.columns = split(line);
      have_columns = true;
      continue;
    }
    CsvRow row = split(line);
    // A torn last line from an interrupted run is dropped.
    if (row.size() != table.columns.size()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::config_error, "malformed row in " + path.string());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::config_error, "cannot write " + tmp.string());
    write_head(out, table);
    for (const auto& row : table.rows) write_row(out, row);
    if (!out) throw Error(ErrorCode::config_error, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CsvAppender::CsvAppender(const std::filesystem::path& path, const CsvTable& head)
    : out_(path, std::ios::trunc) {
  if (!out_) throw Error(ErrorCode::config_error, "cannot write " + path.string());
  write_head(out_, head);
  for (const auto& row : head.rows) write_row(out_, row);
  out_.flush();
}

void CsvAppender::append(const CsvRow& row) {
  write_row(out_, row);
  out_.flush();
}

}  // namespace rkky
