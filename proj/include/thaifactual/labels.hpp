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

#ifndef THAIFACTUAL_LABELS_HPP_
#define THAIFACTUAL_LABELS_HPP_

#include <array>
#include <optional>
#include <string_view>

namespace thaifactual {

// Closed three-way stance label set. The numeric order (support < against <
// neutral) is the fixed tie-break order used everywhere in the project.
enum class StanceLabel : int { kSupport = 0, kAgainst = 1, kNeutral = 2 };

enum class SentimentLabel : int { kPositive = 0, kNegative = 1, kNeutral = 2 };

inline constexpr int kStanceLabelCount = 3;

inline constexpr std::array<StanceLabel, 3> kAllStanceLabels = {
    StanceLabel::kSupport, StanceLabel::kAgainst, StanceLabel::kNeutral};

inline constexpr std::array<SentimentLabel, 3> kAllSentimentLabels = {
    SentimentLabel::kPositive, SentimentLabel::kNegative,
    SentimentLabel::kNeutral};

constexpr std::string_view to_string(StanceLabel label) {
  switch (label) {
    case StanceLabel::kSupport:
      return "support";
    case StanceLabel::kAgainst:
      return "against";
    case StanceLabel::kNeutral:
      return "neutral";
  }
  return "";
}

constexpr std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::kPositive:
      return "positive";
    case SentimentLabel::kNegative:
      return "negative";
    case SentimentLabel::kNeutral:
      return "neutral";
  }
  return "";
}

// Label tokens are lowercase on disk; anything else is a validation error,
// not a fixup ("Support" must be rejected, see corpus validation).
constexpr std::optional<StanceLabel> parse_stance_label(std::string_view s) {
  for (StanceLabel label : kAllStanceLabels) {
    if (s == to_string(label)) return label;
  }
  return std::nullopt;
}

constexpr std::optional<SentimentLabel> parse_sentiment_label(
    std::string_view s) {
  for (SentimentLabel label : kAllSentimentLabels) {
    if (s == to_string(label)) return label;
  }
  return std::nullopt;
}

// The sentiment-to-stance surface mapping: positive -> support,
// negative -> against, neutral -> neutral.
constexpr StanceLabel sentiment_mapped_stance(SentimentLabel sentiment) {
  switch (sentiment) {
    case SentimentLabel::kPositive:
      return StanceLabel::kSupport;
    case SentimentLabel::kNegative:
      return StanceLabel::kAgainst;
    case SentimentLabel::kNeutral:
      return StanceLabel::kNeutral;
  }
  return StanceLabel::kNeutral;
}

// Alignment as counted by Bias-SSC: only the polar pairings count.
// Neutral sentiment agreeing with neutral stance is desired behavior,
// not bias.
constexpr bool sentiment_aligned(SentimentLabel sentiment,
                                 StanceLabel predicted) {
  return (sentiment == SentimentLabel::kPositive &&
          predicted == StanceLabel::kSupport) ||
         (sentiment == SentimentLabel::kNegative &&
          predicted == StanceLabel::kAgainst);
}

}  // namespace thaifactual

#endif  // THAIFACTUAL_LABELS_HPP_
