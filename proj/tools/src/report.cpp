// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace compoly::cli {

Format parse_format(const std::string& s) {
  if (s == "text") return Format::kText;
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  throw std::invalid_argument("unknown format '" + s + "'");
}

Cell cell(int v) { return static_cast<long long>(v); }
Cell cell(long long v) { return v; }
Cell cell(std::size_t v) { return static_cast<long long>(v); }
Cell cell(double v) { return v; }
Cell cell(bool v) { return v; }
Cell cell(std::string v) { return v; }
Cell cell(const char* v) { return std::string(v); }

std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "yes" : "no";
  const double d = std::get<double>(c);
  if (std::isnan(d)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", d);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"') o += '"';
    o += ch;
  }
  return o + "\"";
}

nlohmann::ordered_json to_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  const double d = std::get<double>(c);
  if (!std::isfinite(d)) return format_cell(c);
  return d;
}

void render_text(std::ostream& out, const Report& r) {
  size_t kw = 0;
  for (const auto& [k, v] : r.summary) kw = std::max(kw, k.size());
  for (const auto& [k, v] : r.summary) {
    out << k << std::string(kw - k.size() + 2, ' ') << format_cell(v) << "\n";
  }
  for (const Table& t : r.tables) {
    out << "\n" << t.name << "\n";
    std::vector<size_t> w(t.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (size_t i = 0; i < t.columns.size(); ++i) w[i] = t.columns[i].size();
    for (const auto& row : t.rows) {
      cells.emplace_back();
      for (size_t i = 0; i < row.size() && i < w.size(); ++i) {
        cells.back().push_back(format_cell(row[i]));
        w[i] = std::max(w[i], cells.back().back().size());
      }
    }
    auto line = [&](const std::vector<std::string>& v) {
      std::string s;
      for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += "  ";
        s += std::string(w[i] - v[i].size(), ' ') + v[i];
      }
      out << s << "\n";
    };
    line(t.columns);
    for (const auto& row : cells) line(row);
  }
  if (!r.notes.empty()) out << "\n";
  for (const std::string& n : r.notes) out << "note: " << n << "\n";
}

void render_csv(std::ostream& out, const Report& r) {
  out << "# summary\nkey,value\n";
  for (const auto& [k, v] : r.summary) out << csv_escape(k) << "," << csv_escape(format_cell(v)) << "\n";
  for (const Table& t : r.tables) {
    out << "# " << t.name << "\n";
    for (size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_escape(t.columns[i]);
    out << "\n";
    for (const auto& row : t.rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(format_cell(row[i]));
      out << "\n";
    }
  }
  for (const std::string& n : r.notes) out << "# note: " << n << "\n";
}

void render_json(std::ostream& out, const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["status"] = r.status;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.summary) s[k] = to_json(v);
  j["summary"] = s;
  j["tables"] = nlohmann::ordered_json::array();
  for (const Table& t : r.tables) {
    nlohmann::ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = t.columns;
    jt["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (const Cell& c : row) jr.push_back(to_json(c));
      jt["rows"].push_back(jr);
    }
    j["tables"].push_back(jt);
  }
  j["notes"] = r.notes;
  out << j.dump(2) << "\n";
}

}  // namespace

void render(std::ostream& out, const Report& r, Format f) {
  switch (f) {
    case Format::kText: render_text(out, r); break;
    case Format::kCsv: render_csv(out, r); break;
    case Format::kJson: render_json(out, r); break;
  }
}

}  // namespace compoly::cli
