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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bernstein/core.hpp"

namespace bernstein::io {

/// One CSV field quoted per RFC 4180 when it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Table with a header row, written with CRLF line endings per RFC 4180.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses RFC 4180 text (quoted fields, doubled quotes, CRLF or LF).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Two numeric columns (x, density) with an optional header row.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::filesystem::path& path);

/// Long format: t, x, value.
CsvTable field_table(const ScalarField& f, const std::string& value_name);
/// Long format: t, x, region (0 continuation, 1 stopping).
CsvTable mask_table(const RegionMask& m);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// JSON dump with a fixed indentation and a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace bernstein::io
