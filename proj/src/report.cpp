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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "thaifactual/error.hpp"

namespace thaifactual {

namespace {

// Table precision: one decimal place in human-readable output.
std::string one_decimal(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f", value);
  return buffer;
}

// Full-precision, round-trippable number formatting for CSV.
std::string full_precision(double value) {
  nlohmann::json j = value;
  return j.dump();
}

std::string csv_quote(const std::string& field) {
  bool needs_quoting = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quoting) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}

}  // namespace

LeaderboardRow leaderboard_row(std::string name, const MetricReport& report,
                               std::string notes) {
  LeaderboardRow row;
  row.name = std::move(name);
  row.bias_ssc = report.bias_ssc;
  row.rstd = report.rstd;
  row.macro_f1 = report.macro_f1;
  row.ood = report.ood_macro_f1;
  row.notes = std::move(notes);
  return row;
}

std::string render_leaderboard(std::span<const LeaderboardRow> rows,
                               LeaderboardFormat format) {
  if (rows.empty()) {
    throw ValidationError("leaderboard needs at least one row");
  }

  if (format == LeaderboardFormat::kCsv) {
    std::ostringstream out;
    out << "model,bias_ssc,rstd,macro_f1,ood,notes\r\n";
    for (const LeaderboardRow& row : rows) {
      out << csv_quote(row.name) << ',' << full_precision(row.bias_ssc) << ','
          << full_precision(row.rstd) << ',' << full_precision(row.macro_f1)
          << ',' << (row.ood ? full_precision(*row.ood) : std::string())
          << ',' << csv_quote(row.notes) << "\r\n";
    }
    return out.str();
  }

  // Column winners: minima for the bias columns, maxima for the others.
  double best_ssc = std::numeric_limits<double>::infinity();
  double best_rstd = std::numeric_limits<double>::infinity();
  double best_f1 = -std::numeric_limits<double>::infinity();
  double best_ood = -std::numeric_limits<double>::infinity();
  for (const LeaderboardRow& row : rows) {
    best_ssc = std::min(best_ssc, row.bias_ssc);
    best_rstd = std::min(best_rstd, row.rstd);
    best_f1 = std::max(best_f1, row.macro_f1);
    if (row.ood) best_ood = std::max(best_ood, *row.ood);
  }
  const bool mark = rows.size() > 1;
  const auto cell = [&](double value, double best) {
    std::string text = one_decimal(value);
    if (mark && one_decimal(best) == text) return "**" + text + "**";
    return text;
  };

  std::ostringstream out;
  out << "| Model | Bias-SSC↓ | RStd↓ | F1↑ | OOD↑ | Notes |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const LeaderboardRow& row : rows) {
    out << "| " << row.name << " | " << cell(row.bias_ssc, best_ssc) << " | "
        << cell(row.rstd, best_rstd) << " | " << cell(row.macro_f1, best_f1)
        << " | " << (row.ood ? cell(*row.ood, best_ood) : std::string("-"))
        << " | " << row.notes << " |\n";
  }
  return out.str();
}

std::string render_report_table(const MetricReport& report) {
  std::ostringstream out;
  out << "metric        value\n";
  out << "bias_ssc      " << one_decimal(report.bias_ssc) << "\n";
  out << "rstd          " << one_decimal(report.rstd) << "\n";
  out << "macro_f1      " << one_decimal(report.macro_f1) << "\n";
  if (report.ood_macro_f1) {
    out << "ood_macro_f1  " << one_decimal(*report.ood_macro_f1) << "\n";
  }
  out << "n_scored      " << report.n_scored << "\n";
  out << "n_failed      " << report.n_failed << "\n";
  if (!report.per_entity.empty()) {
    out << "\nper entity (bias_ssc / rstd / macro_f1, '-' = undefined):\n";
    for (const auto& [entity, m] : report.per_entity) {
      out << "  " << entity << "  "
          << (m.bias_ssc ? one_decimal(*m.bias_ssc) : std::string("-")) << " / "
          << (m.rstd ? one_decimal(*m.rstd) : std::string("-")) << " / "
          << (m.macro_f1 ? one_decimal(*m.macro_f1) : std::string("-"))
          << "\n";
    }
  }
  if (!report.ood_per_entity.empty()) {
    out << "\nOOD folds (held-out entity -> macro_f1):\n";
    for (const auto& [entity, value] : report.ood_per_entity) {
      out << "  " << entity << "  " << one_decimal(value) << "\n";
    }
  }
  return out.str();
}

}  // namespace thaifactual
