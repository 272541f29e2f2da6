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

#ifndef THAIFACTUAL_CORPUS_HPP_
#define THAIFACTUAL_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thaifactual/labels.hpp"

namespace thaifactual {

// Annotator-set flags marking an example as a likely bias probe.
struct BiasMarkers {
  bool sentiment_leakage = false;
  bool entity_bias = false;

  bool operator==(const BiasMarkers&) const = default;
};

enum class Provenance { kOriginal, kCounterfactual };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view s);

// One annotated corpus item. Text and rationale are NFC-normalized UTF-8.
struct Example {
  std::string id;
  std::string text;
  std::string target_id;
  StanceLabel stance = StanceLabel::kNeutral;
  SentimentLabel sentiment = SentimentLabel::kNeutral;
  std::optional<std::string> rationale;
  std::optional<BiasMarkers> bias_markers;
  Provenance provenance = Provenance::kOriginal;
  // Required when provenance is counterfactual: the originating example.
  // Counterfactual stance labels are copies of the source's and are treated
  // as unverified; they are never used as gold.
  std::optional<std::string> source_id;

  bool operator==(const Example&) const = default;
};

struct Pronouns {
  std::string subject;
  std::string object;
  std::string possessive;

  bool operator==(const Pronouns&) const = default;
};

enum class PronounKind { kSubject, kObject, kPossessive };

// A political entity with its surface forms. `canonical` is always a member
// of `aliases`; substitution writes the canonical name.
struct EntityEntry {
  std::string entity_id;
  std::string canonical;
  std::vector<std::string> aliases;
  Pronouns pronouns;
  std::optional<std::string> party;

  bool operator==(const EntityEntry&) const = default;

  const std::string& pronoun(PronounKind kind) const {
    switch (kind) {
      case PronounKind::kSubject:
        return pronouns.subject;
      case PronounKind::kObject:
        return pronouns.object;
      case PronounKind::kPossessive:
        return pronouns.possessive;
    }
    return pronouns.subject;
  }
};

// Whether counterfactual source links must resolve within the corpus.
// Partitions of a corpus (e.g. leave-one-entity-out splits) legitimately
// separate a variant from its source, so they relax the check.
enum class SourceLinkPolicy { kStrict, kAllowDangling };

class Corpus {
 public:
  Corpus() = default;

  // Validates corpus-level invariants: unique ids, resolvable targets,
  // counterfactual source links pointing at original examples.
  Corpus(std::vector<Example> examples, std::vector<EntityEntry> lexicon,
         SourceLinkPolicy link_policy = SourceLinkPolicy::kStrict);

  const std::vector<Example>& examples() const { return examples_; }
  const std::vector<EntityEntry>& lexicon() const { return lexicon_; }
  std::size_t size() const { return examples_.size(); }

  const EntityEntry* find_entity(std::string_view entity_id) const;
  const Example* find_example(std::string_view id) const;

 private:
  std::vector<Example> examples_;
  std::vector<EntityEntry> lexicon_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

// A record as it appears on disk, before semantic validation.
struct RawExample {
  std::string id;
  std::string text;
  std::string target_id;
  std::string stance;
  std::string sentiment;
  std::optional<std::string> rationale;
  std::optional<BiasMarkers> bias_markers;
  std::string provenance = "original";
  std::optional<std::string> source_id;
};

// Checks every per-example invariant; throws ValidationError naming the
// violated field and the example id. Applies NFC normalization.
Example validate_example(const RawExample& raw,
                         const std::vector<EntityEntry>& lexicon);

std::vector<EntityEntry> load_lexicon(const std::string& path);

// Loads a line-delimited corpus plus its entity lexicon. Parse errors carry
// the offending line number; validation errors carry the example id.
Corpus load_corpus(const std::string& corpus_path,
                   const std::string& lexicon_path);

// Canonical writer: one record per line, fixed field order, UTF-8. A loaded
// corpus saved and reloaded is field-for-field identical.
void save_corpus(const Corpus& corpus, const std::string& path);
std::string serialize_example(const Example& example);

struct TargetBalance {
  std::string target_id;
  std::size_t total = 0;
  std::array<std::size_t, 3> stance_counts = {0, 0, 0};
  std::array<std::size_t, 3> sentiment_counts = {0, 0, 0};
  // Joint stance x sentiment cells, reported informationally.
  std::array<std::array<std::size_t, 3>, 3> joint_counts = {};
  bool stance_balanced = true;
  bool sentiment_balanced = true;
};

struct BalanceReport {
  std::vector<TargetBalance> targets;
  std::size_t total = 0;
  std::size_t tolerance = 0;
  bool balanced = true;
  std::vector<std::string> offending_targets;
};

// Pure summary over per-target stance/sentiment counts. "Balanced" means
// max-min count difference <= tolerance within each marginal (default:
// exactly equal).
BalanceReport balance_report(const Corpus& corpus, std::size_t tolerance = 0);

std::string balance_report_json(const BalanceReport& report);

// Partition by target entity: eval gets every example whose target is
// `held_out`, fit gets the rest. Both keep the full lexicon.
std::pair<Corpus, Corpus> leave_one_entity_out_split(
    const Corpus& corpus, std::string_view held_out);

struct AnnotationSet {
  std::vector<std::pair<std::string, std::vector<StanceLabel>>> items;
  std::size_t annotator_count = 0;
};

AnnotationSet load_annotations(const std::string& path);

// Fleiss' kappa over the stance label space: (Pbar - Pe) / (1 - Pe).
// Perfect agreement returns exactly 1.0. When expected chance agreement is
// 1 (all mass on a single category) the statistic is undefined and an
// UndefinedMetricError is thrown instead of returning a number.
double fleiss_kappa(const AnnotationSet& annotations);

}  // namespace thaifactual

#endif  // THAIFACTUAL_CORPUS_HPP_
