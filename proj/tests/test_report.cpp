//
// Copyright 2026 The ThaiFACTUAL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "thaifactual/report.hpp"

#include <sstream>

#include "doctest.h"
#include "thaifactual/error.hpp"

using namespace thaifactual;

namespace {

// Minimal RFC 4180 reader used as the parse-back oracle.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      row.push_back(field);
      field.clear();
      rows.push_back(row);
      row.clear();
      ++i;
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

LeaderboardRow row(std::string name, double ssc, double rstd, double f1,
                   std::optional<double> ood, std::string notes = "") {
  LeaderboardRow r;
  r.name = std::move(name);
  r.bias_ssc = ssc;
  r.rstd = rstd;
  r.macro_f1 = f1;
  r.ood = ood;
  r.notes = std::move(notes);
  return r;
}

}  // namespace

TEST_CASE("the better system is marked best in every column") {
  std::vector<LeaderboardRow> rows = {
      row("baseline (raw)", 21.7, 15.2, 70.8, 56.4,
          "surface alignment with tone"),
      row("ThaiFACTUAL", 9.8, 6.4, 73.5, 65.2, "counterfactual calibration"),
  };
  std::string doc = render_leaderboard(rows, LeaderboardFormat::kMarkdown);
  CHECK(doc.find("| Model | Bias-SSC↓ | RStd↓ | F1↑ | OOD↑ | Notes |") !=
        std::string::npos);
  CHECK(doc.find("**9.8**") != std::string::npos);
  CHECK(doc.find("**6.4**") != std::string::npos);
  CHECK(doc.find("**73.5**") != std::string::npos);
  CHECK(doc.find("**65.2**") != std::string::npos);
  // the losing row is not marked
  CHECK(doc.find("**21.7**") == std::string::npos);
  CHECK(doc.find("| 21.7 |") != std::string::npos);
}

TEST_CASE("a single row renders without any best-marking") {
  std::vector<LeaderboardRow> rows = {row("only", 10.0, 5.0, 80.0, 60.0)};
  std::string doc = render_leaderboard(rows, LeaderboardFormat::kMarkdown);
  CHECK(doc.find("**") == std::string::npos);
}

TEST_CASE("markdown rounds to one decimal") {
  std::vector<LeaderboardRow> rows = {
      row("x", 9.84321, 6.449, 73.56, std::nullopt)};
  std::string doc = render_leaderboard(rows, LeaderboardFormat::kMarkdown);
  CHECK(doc.find("9.8") != std::string::npos);
  CHECK(doc.find("6.4") != std::string::npos);
  CHECK(doc.find("73.6") != std::string::npos);
  CHECK(doc.find(" - ") != std::string::npos);  // absent OOD column
}

TEST_CASE("csv renders full precision and survives a parse round-trip") {
  std::vector<LeaderboardRow> rows = {
      row("name, with \"quotes\"", 21.71234567, 15.2, 70.80001, 56.4,
          "notes, with\r\nnewline"),
      row("plain", 9.8, 6.4, 73.5, std::nullopt, ""),
  };
  std::string doc = render_leaderboard(rows, LeaderboardFormat::kCsv);
  auto parsed = parse_csv(doc);
  REQUIRE(parsed.size() == 3);  // header + 2 rows
  CHECK(parsed[0] == std::vector<std::string>{"model", "bias_ssc", "rstd",
                                              "macro_f1", "ood", "notes"});
  CHECK(parsed[1][0] == "name, with \"quotes\"");
  CHECK(parsed[1][5] == "notes, with\r\nnewline");
  CHECK(std::stod(parsed[1][1]) == 21.71234567);
  CHECK(std::stod(parsed[1][3]) == 70.80001);
  CHECK(parsed[2][4] == "");  // absent OOD stays empty
  CHECK(std::stod(parsed[2][2]) == 6.4);
  // no best-marking artifacts in CSV
  CHECK(doc.find("**") == std::string::npos);
}

TEST_CASE("an empty leaderboard is refused") {
  std::vector<LeaderboardRow> rows;
  CHECK_THROWS_AS(render_leaderboard(rows, LeaderboardFormat::kMarkdown),
                  ValidationError);
}

TEST_CASE("report tables print the headline block") {
  MetricReport report;
  report.bias_ssc = 22.22;
  report.rstd = 3.5;
  report.macro_f1 = 88.8;
  report.n_scored = 270;
  std::string table = render_report_table(report);
  CHECK(table.find("bias_ssc") != std::string::npos);
  CHECK(table.find("22.2") != std::string::npos);
  CHECK(table.find("n_scored      270") != std::string::npos);
}
