// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// CSV artifacts: '#' header lines, one header row, fixed number formatting.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rkky {

// Scientific notation with 12 significant digits.
std::string format_number(double v);

using CsvRow = std::vector<std::string>;

struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  CsvRow columns;
  std::vector<CsvRow> rows;
};

// Throws a config error when the file exists but is not a table of this shape.
CsvTable read_csv(const std::filesystem::path& path);

// Writes through a temporary file and a rename so readers never see a torn file.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Appends rows to a file started with the given comments and columns, for
// checkpointing long scans.
class CsvAppender {
 public:
  CsvAppender(const std::filesystem::path& path, const CsvTable& head);
  void append(const CsvRow& row);

 private:
  std::ofstream out_;
};

}  // namespace rkky
