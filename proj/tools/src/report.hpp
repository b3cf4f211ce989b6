// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace compoly::cli {

enum class Format { kText, kCsv, kJson };

Format parse_format(const std::string& s);

using Cell = std::variant<std::string, long long, double, bool>;

Cell cell(int v);
Cell cell(long long v);
Cell cell(std::size_t v);
Cell cell(double v);
Cell cell(bool v);
Cell cell(std::string v);
Cell cell(const char* v);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<Table> tables;
  std::vector<std::string> notes;
  int status = 0;
};

/// Doubles print with 10 significant digits in every format.
std::string format_cell(const Cell& c);

void render(std::ostream& out, const Report& r, Format f);

}  // namespace compoly::cli
