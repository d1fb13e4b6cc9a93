// Copyright 2026 The Bernstein Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bernstein/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "bernstein/errors.hpp"

namespace bernstein::io {

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw InvalidArgument("CSV table needs at least one column");
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw InvalidArgument("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::vector<double>& row) {
  std::vector<std::string> r;
  r.reserve(row.size());
  for (double v : row) r.push_back(format_double(v));
  add_row(std::move(r));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += csv_escape(r[k]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    ++line;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (field_started) throw InvalidArgument("CSV line " + std::to_string(line) + ": stray quote inside field");
      quoted = field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw InvalidArgument("CSV: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

namespace {

bool parse_number(const std::string& s, double& out) {
  std::size_t b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return false;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(read_text(path));
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2)
      throw InvalidArgument(path.string() + ": line " + std::to_string(r + 1) + " must have 2 columns");
    double x, y;
    if (!parse_number(row[0], x) || !parse_number(row[1], y)) {
      if (r == 0) continue;  // header
      throw InvalidArgument(path.string() + ": line " + std::to_string(r + 1) + " is not numeric");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) throw InvalidArgument(path.string() + ": no data rows");
  return {std::move(xs), std::move(ys)};
}

CsvTable field_table(const ScalarField& f, const std::string& value_name) {
  CsvTable t({"t", "x", value_name});
  const auto& g = f.grid();
  for (std::size_t n = 0; n < g.nt(); ++n)
    for (std::size_t i = 0; i < g.nx(); ++i) t.add_row(std::vector<double>{g.t(n), g.x(i), f(n, i)});
  return t;
}

CsvTable mask_table(const RegionMask& m) {
  CsvTable t({"t", "x", "stopping"});
  const auto& g = m.grid();
  for (std::size_t n = 0; n < g.nt(); ++n)
    for (std::size_t i = 0; i < g.nx(); ++i)
      t.add_row(std::vector<double>{g.t(n), g.x(i), m.stopping(n, i) ? 1.0 : 0.0});
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::string out;
  char hex[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(hex, sizeof hex, "%02x", md[k]);
    out += hex;
  }
  return out;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace bernstein::io
