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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "bernstein/errors.hpp"
#include "bernstein/io.hpp"

using namespace bernstein;
using namespace bernstein::io;

TEST_CASE("RFC 4180 quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("doubles round-trip in shortest form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-3.0) == "-3");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("tables serialise with CRLF and parse back") {
  CsvTable t({"name", "value"});
  t.add_row({std::string("a,b"), std::string("x\"y")});
  t.add_row(std::vector<double>{1.5, -2.0});
  const auto s = t.str();
  CHECK(s.find("\r\n") != std::string::npos);
  const auto rows = parse_csv(s);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "a,b");
  CHECK(rows[1][1] == "x\"y");
  CHECK(rows[2][1] == "-2");
  CHECK_THROWS_AS(t.add_row(std::vector<double>{1.0}), InvalidArgument);
  CHECK_THROWS(parse_csv("\"open"));
}

TEST_CASE("two-column files and field tables") {
  const auto dir = std::filesystem::temp_directory_path() / "bernstein_test_io";
  std::filesystem::remove_all(dir);
  write_text(dir / "sub" / "m.csv", "x,p\r\n0,0.5\r\n1,0.25\n");
  const auto [x, p] = read_two_column_csv(dir / "sub" / "m.csv");
  CHECK(x == std::vector<double>{0.0, 1.0});
  CHECK(p == std::vector<double>{0.5, 0.25});
  const auto g = build_grid(0.0, 1.0, 3, 0.0, 1.0, 2);
  CHECK(field_table(ScalarField(g, 2.0), "u").rows() == 6);
  CHECK(mask_table(RegionMask(g)).header().back() == "stopping");
  CHECK(read_text(dir / "sub" / "m.csv").size() > 0);
  CHECK_THROWS(read_text(dir / "missing.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("SHA-256 and JSON dumps") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(dump_json({{"a", 1}}) == "{\n  \"a\": 1\n}\n");
}
