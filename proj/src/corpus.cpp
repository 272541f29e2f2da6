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

#include "thaifactual/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "thaifactual/error.hpp"
#include "thaifactual/unicode.hpp"

namespace thaifactual {

using detail::Json;
using detail::OrderedJson;

std::string_view to_string(Provenance p) {
  return p == Provenance::kOriginal ? "original" : "counterfactual";
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  if (s == "original") return Provenance::kOriginal;
  if (s == "counterfactual") return Provenance::kCounterfactual;
  return std::nullopt;
}

namespace {

[[noreturn]] void field_error(const std::string& id, const std::string& field,
                              const std::string& detail) {
  throw ValidationError("example '" + id + "': " + field + ": " + detail);
}

void validate_lexicon(const std::vector<EntityEntry>& lexicon) {
  std::set<std::string> seen_ids;
  for (const EntityEntry& entry : lexicon) {
    if (entry.entity_id.empty()) {
      throw ValidationError("lexicon entry with empty entity_id");
    }
    if (!seen_ids.insert(entry.entity_id).second) {
      throw ValidationError("duplicate entity_id '" + entry.entity_id +
                            "' in lexicon");
    }
    if (entry.aliases.empty()) {
      throw ValidationError("entity '" + entry.entity_id + "': no aliases");
    }
    std::set<std::string> seen_aliases;
    for (const std::string& alias : entry.aliases) {
      if (uni::trim(alias).empty()) {
        throw ValidationError("entity '" + entry.entity_id +
                              "': empty alias");
      }
      if (!seen_aliases.insert(alias).second) {
        throw ValidationError("entity '" + entry.entity_id +
                              "': aliases not distinct after normalization: '" +
                              alias + "'");
      }
    }
    if (!seen_aliases.count(entry.canonical)) {
      throw ValidationError("entity '" + entry.entity_id +
                            "': canonical name '" + entry.canonical +
                            "' is not listed among aliases");
    }
    if (entry.pronouns.subject.empty() || entry.pronouns.object.empty() ||
        entry.pronouns.possessive.empty()) {
      throw ValidationError("entity '" + entry.entity_id +
                            "': pronoun map must fill subject, object and "
                            "possessive");
    }
  }
}

}  // namespace

Corpus::Corpus(std::vector<Example> examples, std::vector<EntityEntry> lexicon,
               SourceLinkPolicy link_policy)
    : examples_(std::move(examples)), lexicon_(std::move(lexicon)) {
  validate_lexicon(lexicon_);
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& ex = examples_[i];
    // Duplicate ids are a hard error: a silent overwrite would corrupt
    // counterfactual pairing.
    if (!by_id_.emplace(ex.id, i).second) {
      throw ValidationError("duplicate example id '" + ex.id + "'");
    }
    if (find_entity(ex.target_id) == nullptr) {
      field_error(ex.id, "target_id",
                  "unresolved entity '" + ex.target_id + "'");
    }
  }
  for (const Example& ex : examples_) {
    if (ex.provenance == Provenance::kCounterfactual && !ex.source_id) {
      field_error(ex.id, "source_id",
                  "required for counterfactual provenance");
    }
  }
  if (link_policy == SourceLinkPolicy::kAllowDangling) return;
  for (const Example& ex : examples_) {
    if (ex.provenance != Provenance::kCounterfactual) continue;
    const Example* source = find_example(*ex.source_id);
    if (source == nullptr) {
      field_error(ex.id, "source_id",
                  "references unknown example '" + *ex.source_id + "'");
    }
    if (source->provenance != Provenance::kOriginal) {
      field_error(ex.id, "source_id",
                  "must reference an original example, but '" +
                      *ex.source_id + "' is counterfactual");
    }
  }
}

const EntityEntry* Corpus::find_entity(std::string_view entity_id) const {
  for (const EntityEntry& entry : lexicon_) {
    if (entry.entity_id == entity_id) return &entry;
  }
  return nullptr;
}

const Example* Corpus::find_example(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &examples_[it->second];
}

Example validate_example(const RawExample& raw,
                         const std::vector<EntityEntry>& lexicon) {
  const std::string& id = raw.id;
  if (uni::trim(id).empty()) {
    throw ValidationError("example with empty id");
  }

  Example out;
  out.id = uni::nfc(id);
  out.text = uni::nfc(raw.text);
  if (uni::trim(out.text).empty()) {
    field_error(out.id, "text", "empty after whitespace trim");
  }

  out.target_id = uni::nfc(raw.target_id);
  bool resolved = std::any_of(
      lexicon.begin(), lexicon.end(),
      [&](const EntityEntry& e) { return e.entity_id == out.target_id; });
  if (!resolved) {
    field_error(out.id, "target_id",
                "unresolved entity '" + out.target_id + "'");
  }

  auto stance = parse_stance_label(raw.stance);
  if (!stance) {
    field_error(out.id, "stance", "unknown label '" + raw.stance + "'");
  }
  out.stance = *stance;

  auto sentiment = parse_sentiment_label(raw.sentiment);
  if (!sentiment) {
    field_error(out.id, "sentiment", "unknown label '" + raw.sentiment + "'");
  }
  out.sentiment = *sentiment;

  if (raw.rationale) out.rationale = uni::nfc(*raw.rationale);
  out.bias_markers = raw.bias_markers;

  auto provenance = parse_provenance(raw.provenance);
  if (!provenance) {
    field_error(out.id, "provenance",
                "must be 'original' or 'counterfactual', got '" +
                    raw.provenance + "'");
  }
  out.provenance = *provenance;

  if (out.provenance == Provenance::kCounterfactual) {
    if (!raw.source_id || uni::trim(*raw.source_id).empty()) {
      field_error(out.id, "source_id",
                  "required for counterfactual provenance");
    }
    out.source_id = uni::nfc(*raw.source_id);
  } else if (raw.source_id) {
    field_error(out.id, "source_id", "only valid on counterfactual records");
  }
  return out;
}

namespace {

RawExample raw_from_json(const Json& obj, const std::string& where) {
  RawExample raw;
  raw.id = detail::require_string(obj, "id", where);
  raw.text = detail::require_string(obj, "text", where);
  raw.target_id = detail::require_string(obj, "target_id", where);
  raw.stance = detail::require_string(obj, "stance", where);
  raw.sentiment = detail::require_string(obj, "sentiment", where);
  if (obj.contains("rationale") && !obj["rationale"].is_null()) {
    if (!obj["rationale"].is_string()) {
      throw ParseError(where + ": non-string field 'rationale'");
    }
    raw.rationale = obj["rationale"].get<std::string>();
  }
  if (obj.contains("bias_markers") && !obj["bias_markers"].is_null()) {
    const Json& bm = obj["bias_markers"];
    if (!bm.is_object() || !bm.contains("sentiment_leakage") ||
        !bm.contains("entity_bias") || !bm["sentiment_leakage"].is_boolean() ||
        !bm["entity_bias"].is_boolean()) {
      throw ParseError(where +
                       ": bias_markers must be an object with boolean "
                       "'sentiment_leakage' and 'entity_bias'");
    }
    raw.bias_markers = BiasMarkers{bm["sentiment_leakage"].get<bool>(),
                                   bm["entity_bias"].get<bool>()};
  }
  if (obj.contains("provenance")) {
    raw.provenance = detail::require_string(obj, "provenance", where);
  }
  if (obj.contains("source_id") && !obj["source_id"].is_null()) {
    raw.source_id = detail::require_string(obj, "source_id", where);
  }
  return raw;
}

}  // namespace

std::vector<EntityEntry> load_lexicon(const std::string& path) {
  Json doc = detail::load_json_file(path);
  if (!doc.is_array()) {
    throw ParseError(path + ": lexicon must be a top-level array of entries");
  }
  std::vector<EntityEntry> lexicon;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const Json& obj = doc[i];
    const std::string where = path + ": entry " + std::to_string(i);
    if (!obj.is_object()) throw ParseError(where + ": not an object");
    EntityEntry entry;
    entry.entity_id = uni::nfc(detail::require_string(obj, "entity_id", where));
    entry.canonical = uni::nfc(detail::require_string(obj, "canonical", where));
    if (!obj.contains("aliases") || !obj["aliases"].is_array()) {
      throw ParseError(where + ": missing 'aliases' array");
    }
    for (const Json& alias : obj["aliases"]) {
      if (!alias.is_string()) throw ParseError(where + ": non-string alias");
      entry.aliases.push_back(uni::nfc(alias.get<std::string>()));
    }
    if (!obj.contains("pronouns") || !obj["pronouns"].is_object()) {
      throw ParseError(where + ": missing 'pronouns' object");
    }
    const Json& pr = obj["pronouns"];
    // The key set is closed: exactly subject, object, possessive.
    if (pr.size() != 3 || !pr.contains("subject") || !pr.contains("object") ||
        !pr.contains("possessive")) {
      throw ParseError(where +
                       ": pronouns must have exactly the keys subject, "
                       "object, possessive");
    }
    entry.pronouns.subject = uni::nfc(detail::require_string(pr, "subject", where));
    entry.pronouns.object = uni::nfc(detail::require_string(pr, "object", where));
    entry.pronouns.possessive =
        uni::nfc(detail::require_string(pr, "possessive", where));
    if (obj.contains("party") && !obj["party"].is_null()) {
      entry.party = uni::nfc(detail::require_string(obj, "party", where));
    }
    lexicon.push_back(std::move(entry));
  }
  validate_lexicon(lexicon);
  return lexicon;
}

Corpus load_corpus(const std::string& corpus_path,
                   const std::string& lexicon_path) {
  std::vector<EntityEntry> lexicon = load_lexicon(lexicon_path);
  std::vector<Example> examples;
  detail::for_each_jsonl(corpus_path, [&](std::size_t line_no, const Json& obj) {
    const std::string where = corpus_path + ":" + std::to_string(line_no);
    examples.push_back(validate_example(raw_from_json(obj, where), lexicon));
  });
  return Corpus(std::move(examples), std::move(lexicon));
}

std::string serialize_example(const Example& example) {
  OrderedJson obj;
  obj["id"] = example.id;
  obj["text"] = example.text;
  obj["target_id"] = example.target_id;
  obj["stance"] = to_string(example.stance);
  obj["sentiment"] = to_string(example.sentiment);
  if (example.rationale) obj["rationale"] = *example.rationale;
  if (example.bias_markers) {
    obj["bias_markers"] = {
        {"sentiment_leakage", example.bias_markers->sentiment_leakage},
        {"entity_bias", example.bias_markers->entity_bias}};
  }
  obj["provenance"] = to_string(example.provenance);
  if (example.source_id) obj["source_id"] = *example.source_id;
  return obj.dump();
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  for (const Example& ex : corpus.examples()) {
    out << serialize_example(ex) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

BalanceReport balance_report(const Corpus& corpus, std::size_t tolerance) {
  BalanceReport report;
  report.tolerance = tolerance;
  report.total = corpus.size();

  const auto spread_ok = [tolerance](const std::array<std::size_t, 3>& c) {
    std::size_t lo = std::min({c[0], c[1], c[2]});
    std::size_t hi = std::max({c[0], c[1], c[2]});
    return hi - lo <= tolerance;
  };

  for (const EntityEntry& entity : corpus.lexicon()) {
    TargetBalance tb;
    tb.target_id = entity.entity_id;
    for (const Example& ex : corpus.examples()) {
      if (ex.target_id != entity.entity_id) continue;
      ++tb.total;
      ++tb.stance_counts[static_cast<int>(ex.stance)];
      ++tb.sentiment_counts[static_cast<int>(ex.sentiment)];
      ++tb.joint_counts[static_cast<int>(ex.stance)]
                       [static_cast<int>(ex.sentiment)];
    }
    tb.stance_balanced = spread_ok(tb.stance_counts);
    tb.sentiment_balanced = spread_ok(tb.sentiment_counts);
    if (!tb.stance_balanced || !tb.sentiment_balanced) {
      report.balanced = false;
      report.offending_targets.push_back(tb.target_id);
    }
    report.targets.push_back(std::move(tb));
  }
  return report;
}

std::string balance_report_json(const BalanceReport& report) {
  OrderedJson doc;
  doc["total"] = report.total;
  doc["tolerance"] = report.tolerance;
  doc["balanced"] = report.balanced;
  doc["offending_targets"] = report.offending_targets;
  doc["targets"] = OrderedJson::array();
  for (const TargetBalance& tb : report.targets) {
    OrderedJson t;
    t["target_id"] = tb.target_id;
    t["total"] = tb.total;
    OrderedJson stance_counts, sentiment_counts, joint;
    for (StanceLabel s : kAllStanceLabels) {
      stance_counts[std::string(to_string(s))] =
          tb.stance_counts[static_cast<int>(s)];
      OrderedJson row;
      for (SentimentLabel sm : kAllSentimentLabels) {
        row[std::string(to_string(sm))] =
            tb.joint_counts[static_cast<int>(s)][static_cast<int>(sm)];
      }
      joint[std::string(to_string(s))] = row;
    }
    for (SentimentLabel sm : kAllSentimentLabels) {
      sentiment_counts[std::string(to_string(sm))] =
          tb.sentiment_counts[static_cast<int>(sm)];
    }
    t["stance_counts"] = stance_counts;
    t["sentiment_counts"] = sentiment_counts;
    t["joint_counts"] = joint;
    t["stance_balanced"] = tb.stance_balanced;
    t["sentiment_balanced"] = tb.sentiment_balanced;
    doc["targets"].push_back(t);
  }
  return doc.dump(2);
}

std::pair<Corpus, Corpus> leave_one_entity_out_split(
    const Corpus& corpus, std::string_view held_out) {
  if (corpus.find_entity(held_out) == nullptr) {
    throw ValidationError("unknown entity '" + std::string(held_out) + "'");
  }
  if (corpus.lexicon().size() < 2) {
    throw ValidationError(
        "leave-one-entity-out requires at least 2 entities in the lexicon");
  }
  std::vector<Example> fit, eval;
  for (const Example& ex : corpus.examples()) {
    if (ex.target_id == held_out) {
      eval.push_back(ex);
    } else {
      fit.push_back(ex);
    }
  }
  // A variant and its source may now sit in different halves.
  return {Corpus(std::move(fit), corpus.lexicon(),
                 SourceLinkPolicy::kAllowDangling),
          Corpus(std::move(eval), corpus.lexicon(),
                 SourceLinkPolicy::kAllowDangling)};
}

AnnotationSet load_annotations(const std::string& path) {
  AnnotationSet set;
  detail::for_each_jsonl(path, [&](std::size_t line_no, const Json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    std::string item_id = detail::require_string(obj, "item_id", where);
    if (!obj.contains("labels") || !obj["labels"].is_array()) {
      throw ParseError(where + ": missing 'labels' array");
    }
    std::vector<StanceLabel> labels;
    for (const Json& raw : obj["labels"]) {
      if (!raw.is_string()) throw ParseError(where + ": non-string label");
      auto label = parse_stance_label(raw.get<std::string>());
      if (!label) {
        throw ValidationError(where + ": unknown stance label '" +
                              raw.get<std::string>() + "'");
      }
      labels.push_back(*label);
    }
    if (set.items.empty()) {
      set.annotator_count = labels.size();
    } else if (labels.size() != set.annotator_count) {
      throw ValidationError(where + ": item '" + item_id + "' has " +
                            std::to_string(labels.size()) +
                            " annotations, expected " +
                            std::to_string(set.annotator_count));
    }
    set.items.emplace_back(std::move(item_id), std::move(labels));
  });
  return set;
}

double fleiss_kappa(const AnnotationSet& annotations) {
  const std::size_t n_items = annotations.items.size();
  const std::size_t n_annotators = annotations.annotator_count;
  if (n_items < 1) {
    throw ValidationError("fleiss_kappa requires at least 1 item");
  }
  if (n_annotators < 2) {
    throw ValidationError("fleiss_kappa requires at least 2 annotators");
  }

  double sum_item_agreement = 0.0;
  std::array<std::size_t, 3> category_totals = {0, 0, 0};
  for (const auto& [item_id, labels] : annotations.items) {
    if (labels.size() != n_annotators) {
      throw ValidationError("item '" + item_id +
                            "' has inconsistent annotation count");
    }
    std::array<std::size_t, 3> counts = {0, 0, 0};
    for (StanceLabel label : labels) ++counts[static_cast<int>(label)];
    std::size_t pair_sum = 0;
    for (std::size_t c : counts) {
      pair_sum += c * c;
      // accumulate for the chance-agreement term
    }
    for (int k = 0; k < 3; ++k) category_totals[k] += counts[k];
    sum_item_agreement +=
        static_cast<double>(pair_sum - n_annotators) /
        static_cast<double>(n_annotators * (n_annotators - 1));
  }

  const double p_bar = sum_item_agreement / static_cast<double>(n_items);
  double pe_bar = 0.0;
  const double total =
      static_cast<double>(n_items) * static_cast<double>(n_annotators);
  for (std::size_t c : category_totals) {
    const double p = static_cast<double>(c) / total;
    pe_bar += p * p;
  }

  if (pe_bar >= 1.0) {
    throw UndefinedMetricError(
        "undefined agreement: all annotations fall on a single category "
        "(chance agreement = 1)");
  }
  return (p_bar - pe_bar) / (1.0 - pe_bar);
}

}  // namespace thaifactual
