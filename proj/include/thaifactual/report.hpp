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

#ifndef THAIFACTUAL_REPORT_HPP_
#define THAIFACTUAL_REPORT_HPP_

#include <optional>
#include <span>
#include <string>

#include "thaifactual/metrics.hpp"

namespace thaifactual {

// One leaderboard line. Metric fields come straight out of a MetricReport;
// nothing here is ever hand-entered or recomputed beyond rounding.
struct LeaderboardRow {
  std::string name;
  double bias_ssc = 0.0;   // lower is better
  double rstd = 0.0;       // lower is better
  double macro_f1 = 0.0;   // higher is better
  std::optional<double> ood;  // higher is better
  std::string notes;
};

LeaderboardRow leaderboard_row(std::string name, const MetricReport& report,
                               std::string notes = "");

enum class LeaderboardFormat { kMarkdown, kCsv };

// Markdown output rounds to one decimal and bolds the best value per metric
// column. CSV output is RFC 4180 quoted and keeps full precision so the
// values survive a parse round-trip; it carries no best-marking.
std::string render_leaderboard(std::span<const LeaderboardRow> rows,
                               LeaderboardFormat format);

// Human-readable fixed-width table for one report (the `evaluate` output).
std::string render_report_table(const MetricReport& report);

}  // namespace thaifactual

#endif  // THAIFACTUAL_REPORT_HPP_
