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

#include "thaifactual/counterfactual.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "thaifactual/error.hpp"
#include "thaifactual/unicode.hpp"

namespace thaifactual {

namespace {

struct Candidate {
  std::size_t start_byte = 0;
  std::size_t end_byte = 0;
  std::size_t start_cluster = 0;
  std::size_t end_cluster = 0;
  std::string matched;  // the text's own bytes over [start_byte, end_byte)
  SpanKind kind = SpanKind::kAlias;
};

// Maps a byte offset to its cluster index; only boundary offsets are valid.
class ClusterIndex {
 public:
  explicit ClusterIndex(std::string_view text)
      : boundaries_(uni::grapheme_boundaries(text)) {}

  bool aligned(std::size_t byte_offset) const {
    return std::binary_search(boundaries_.begin(), boundaries_.end(),
                              byte_offset);
  }

  std::size_t cluster_of(std::size_t byte_offset) const {
    auto it = std::lower_bound(boundaries_.begin(), boundaries_.end(),
                               byte_offset);
    return static_cast<std::size_t>(it - boundaries_.begin());
  }

  std::size_t byte_of(std::size_t cluster) const {
    return boundaries_[cluster];
  }

  std::size_t cluster_count() const { return boundaries_.size() - 1; }

 private:
  std::vector<std::size_t> boundaries_;
};

char32_t first_codepoint(std::string_view s) {
  std::size_t pos = 0;
  return uni::decode_codepoint(s, pos);
}

char32_t last_codepoint(std::string_view s) {
  std::size_t pos = 0;
  char32_t cp = 0;
  while (pos < s.size()) cp = uni::decode_codepoint(s, pos);
  return cp;
}

bool is_wordish(char32_t cp) {
  return uni::is_latin_letter(cp) || uni::is_ascii_digit(cp);
}

// Word-boundary test for the Latin-script edges of a token occurrence.
bool edges_ok(std::string_view text, std::string_view token, std::size_t start,
              std::size_t end) {
  if (uni::is_latin_letter(first_codepoint(token)) && start > 0) {
    // Walk back one code point.
    std::size_t p = start;
    do {
      --p;
    } while (p > 0 && (static_cast<unsigned char>(text[p]) & 0xC0) == 0x80);
    std::size_t tmp = p;
    if (is_wordish(uni::decode_codepoint(text, tmp))) return false;
  }
  if (uni::is_latin_letter(last_codepoint(token)) && end < text.size()) {
    std::size_t tmp = end;
    if (is_wordish(uni::decode_codepoint(text, tmp))) return false;
  }
  return true;
}

void collect_occurrences(std::string_view text, std::string_view haystack,
                         std::string_view needle, SpanKind kind,
                         const ClusterIndex& index,
                         std::vector<Candidate>& out) {
  if (needle.empty()) return;
  std::size_t from = 0;
  while (true) {
    std::size_t pos = haystack.find(needle, from);
    if (pos == std::string_view::npos) break;
    from = pos + 1;
    std::size_t end = pos + needle.size();
    if (!index.aligned(pos) || !index.aligned(end)) continue;
    if (!edges_ok(text, needle, pos, end)) continue;
    Candidate c;
    c.start_byte = pos;
    c.end_byte = end;
    c.start_cluster = index.cluster_of(pos);
    c.end_cluster = index.cluster_of(end);
    c.matched = std::string(text.substr(pos, needle.size()));
    c.kind = kind;
    out.push_back(std::move(c));
  }
}

std::vector<Candidate> find_candidates(std::string_view text,
                                       const EntityEntry& entity,
                                       const ClusterIndex& index) {
  std::vector<Candidate> candidates;
  for (const std::string& alias : entity.aliases) {
    collect_occurrences(text, text, alias, SpanKind::kAlias, index,
                        candidates);
  }
  // Pronouns match ASCII-case-insensitively; the folded haystack has the
  // same byte layout, so offsets carry over.
  const std::string folded_text = uni::ascii_lower(text);
  const std::pair<const std::string*, SpanKind> pronoun_slots[] = {
      {&entity.pronouns.subject, SpanKind::kPronounSubject},
      {&entity.pronouns.object, SpanKind::kPronounObject},
      {&entity.pronouns.possessive, SpanKind::kPronounPossessive},
  };
  for (const auto& [token, kind] : pronoun_slots) {
    collect_occurrences(text, folded_text, uni::ascii_lower(*token), kind,
                        index, candidates);
  }
  return candidates;
}

// Longest match first, leftmost first on ties; accepted spans never overlap.
std::vector<Candidate> select_spans(std::vector<Candidate> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     std::size_t la = a.end_cluster - a.start_cluster;
                     std::size_t lb = b.end_cluster - b.start_cluster;
                     if (la != lb) return la > lb;
                     return a.start_cluster < b.start_cluster;
                   });
  std::vector<Candidate> accepted;
  for (Candidate& c : candidates) {
    bool overlaps = std::any_of(
        accepted.begin(), accepted.end(), [&](const Candidate& s) {
          return c.start_cluster < s.end_cluster &&
                 s.start_cluster < c.end_cluster;
        });
    if (!overlaps) accepted.push_back(std::move(c));
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.start_cluster < b.start_cluster;
            });
  return accepted;
}

bool is_ascii_upper(char32_t cp) { return cp >= 'A' && cp <= 'Z'; }

// Mirrors the first letter's case of the replaced token, so sentence-initial
// "His" becomes "Her" and mid-sentence "his" becomes "her". ASCII only;
// Thai has no case.
std::string mirror_case(std::string_view original, std::string replacement) {
  if (original.empty() || replacement.empty()) return replacement;
  char& repl_first = replacement[0];
  if (is_ascii_upper(first_codepoint(original)) && repl_first >= 'a' &&
      repl_first <= 'z') {
    repl_first = static_cast<char>(repl_first - 'a' + 'A');
  }
  return replacement;
}

const EntityEntry& require_entity(const std::vector<EntityEntry>& lexicon,
                                  std::string_view entity_id) {
  for (const EntityEntry& e : lexicon) {
    if (e.entity_id == entity_id) return e;
  }
  throw ValidationError("unknown entity '" + std::string(entity_id) + "'");
}

struct RewriteResult {
  std::string text;
  std::vector<EntitySpan> new_spans;  // cluster offsets in the new text
};

// Applies the replacement rule to every selected span; bytes outside spans
// are copied verbatim.
RewriteResult rewrite(std::string_view text,
                      const std::vector<Candidate>& spans,
                      const EntityEntry& to,
                      bool pronouns_too) {
  RewriteResult result;
  std::size_t copied_until = 0;
  std::size_t out_clusters = 0;
  for (const Candidate& span : spans) {
    std::string_view gap =
        text.substr(copied_until, span.start_byte - copied_until);
    result.text.append(gap);
    out_clusters += gap.empty() ? 0 : uni::grapheme_count(gap);

    std::string replacement;
    switch (span.kind) {
      case SpanKind::kAlias:
        replacement = to.canonical;
        break;
      case SpanKind::kPronounSubject:
        replacement = mirror_case(span.matched, to.pronouns.subject);
        break;
      case SpanKind::kPronounObject:
        replacement = mirror_case(span.matched, to.pronouns.object);
        break;
      case SpanKind::kPronounPossessive:
        replacement = mirror_case(span.matched, to.pronouns.possessive);
        break;
    }
    if (!pronouns_too && span.kind != SpanKind::kAlias) {
      // Caller asked for alias rewriting only: keep the original bytes.
      replacement = span.matched;
      result.text.append(replacement);
      out_clusters += uni::grapheme_count(replacement);
      copied_until = span.end_byte;
      continue;
    }

    EntitySpan out_span;
    out_span.start = out_clusters;
    out_span.matched_alias = replacement;
    out_span.entity_id = to.entity_id;
    out_span.kind = span.kind;
    result.text.append(replacement);
    out_clusters += uni::grapheme_count(replacement);
    out_span.end = out_clusters;
    result.new_spans.push_back(std::move(out_span));
    copied_until = span.end_byte;
  }
  result.text.append(text.substr(copied_until));
  return result;
}

std::vector<Candidate> selected_spans_for(std::string_view text,
                                          const std::vector<EntityEntry>& lexicon,
                                          std::string_view target) {
  const EntityEntry& entity = require_entity(lexicon, target);
  ClusterIndex index(text);
  return select_spans(find_candidates(text, entity, index));
}

}  // namespace

std::string_view to_string(SpanKind kind) {
  switch (kind) {
    case SpanKind::kAlias:
      return "alias";
    case SpanKind::kPronounSubject:
      return "pronoun_subject";
    case SpanKind::kPronounObject:
      return "pronoun_object";
    case SpanKind::kPronounPossessive:
      return "pronoun_possessive";
  }
  return "";
}

std::vector<EntitySpan> find_entity_spans(
    std::string_view text, const std::vector<EntityEntry>& lexicon,
    std::string_view target) {
  const EntityEntry& entity = require_entity(lexicon, target);
  std::vector<Candidate> selected = selected_spans_for(text, lexicon, target);
  std::vector<EntitySpan> spans;
  spans.reserve(selected.size());
  for (const Candidate& c : selected) {
    EntitySpan span;
    span.start = c.start_cluster;
    span.end = c.end_cluster;
    span.matched_alias = c.matched;
    span.entity_id = entity.entity_id;
    span.kind = c.kind;
    spans.push_back(std::move(span));
  }
  return spans;
}

std::string counterfactual_id(std::string_view source_id,
                              std::string_view to) {
  return std::string(source_id) + "::cf::" + std::string(to);
}

CounterfactualVariant substitute_entity(const Example& example,
                                        const std::vector<EntityEntry>& lexicon,
                                        std::string_view to) {
  if (example.provenance != Provenance::kOriginal) {
    throw ValidationError("example '" + example.id +
                          "': substitution requires an original example");
  }
  if (to == example.target_id) {
    throw ValidationError("example '" + example.id +
                          "': identity swap to '" + std::string(to) +
                          "' is not a counterfactual");
  }
  const EntityEntry& to_entity = require_entity(lexicon, to);

  std::vector<Candidate> spans =
      selected_spans_for(example.text, lexicon, example.target_id);
  bool has_alias = std::any_of(spans.begin(), spans.end(), [](const Candidate& c) {
    return c.kind == SpanKind::kAlias;
  });
  if (!has_alias) {
    throw ValidationError("example '" + example.id + "': target '" +
                          example.target_id +
                          "' is never mentioned by name; substitution is "
                          "undefined");
  }

  RewriteResult rewritten =
      rewrite(example.text, spans, to_entity, /*pronouns_too=*/true);

  CounterfactualVariant variant;
  variant.swapped_from = example.target_id;
  variant.swapped_to = to_entity.entity_id;
  variant.edited_spans = std::move(rewritten.new_spans);

  Example& out = variant.example;
  out.id = counterfactual_id(example.id, to_entity.entity_id);
  out.text = std::move(rewritten.text);
  out.target_id = to_entity.entity_id;
  // Labels travel with the text skeleton but the stance is unverified; the
  // counterfactual provenance mark is what downstream consumers key on.
  out.stance = example.stance;
  out.sentiment = example.sentiment;
  out.provenance = Provenance::kCounterfactual;
  out.source_id = example.id;
  if (example.rationale) {
    std::vector<Candidate> rationale_spans =
        selected_spans_for(*example.rationale, lexicon, example.target_id);
    out.rationale =
        rewrite(*example.rationale, rationale_spans, to_entity, true).text;
  }
  return variant;
}

CounterfactualSet generate_counterfactual_set(
    const Example& example, const std::vector<EntityEntry>& lexicon) {
  CounterfactualSet set;
  set.original = example;
  for (const EntityEntry& entity : lexicon) {
    if (entity.entity_id == example.target_id) continue;
    set.variants.push_back(
        substitute_entity(example, lexicon, entity.entity_id));
  }
  return set;
}

Example canonicalize_mentions(const Example& example,
                              const std::vector<EntityEntry>& lexicon) {
  const EntityEntry& self = require_entity(lexicon, example.target_id);
  std::vector<Candidate> spans =
      selected_spans_for(example.text, lexicon, example.target_id);
  Example out = example;
  out.text = rewrite(example.text, spans, self, /*pronouns_too=*/false).text;
  if (example.rationale) {
    std::vector<Candidate> rationale_spans =
        selected_spans_for(*example.rationale, lexicon, example.target_id);
    out.rationale =
        rewrite(*example.rationale, rationale_spans, self, false).text;
  }
  return out;
}

Corpus generate_augmented_corpus(const Corpus& corpus) {
  std::vector<Example> out;
  out.reserve(corpus.size() * corpus.lexicon().size());
  for (const Example& ex : corpus.examples()) {
    CounterfactualSet set = generate_counterfactual_set(ex, corpus.lexicon());
    out.push_back(set.original);
    for (CounterfactualVariant& v : set.variants) {
      out.push_back(std::move(v.example));
    }
  }
  return Corpus(std::move(out), corpus.lexicon());
}

std::vector<CounterfactualSet> group_counterfactual_sets(
    const Corpus& augmented) {
  std::vector<CounterfactualSet> sets;
  std::map<std::string, std::size_t> set_of_original;
  for (const Example& ex : augmented.examples()) {
    if (ex.provenance == Provenance::kOriginal) {
      set_of_original[ex.id] = sets.size();
      CounterfactualSet set;
      set.original = ex;
      sets.push_back(std::move(set));
    }
  }
  for (const Example& ex : augmented.examples()) {
    if (ex.provenance != Provenance::kCounterfactual) continue;
    auto it = set_of_original.find(*ex.source_id);
    if (it == set_of_original.end()) {
      throw ValidationError("variant '" + ex.id +
                            "' has no original in this corpus");
    }
    CounterfactualVariant variant;
    variant.swapped_from = sets[it->second].original.target_id;
    variant.swapped_to = ex.target_id;
    variant.example = ex;
    sets[it->second].variants.push_back(std::move(variant));
  }
  // Coverage: each set's swap targets must be exactly the other entities.
  for (const CounterfactualSet& set : sets) {
    std::set<std::string> expected, got;
    for (const EntityEntry& e : augmented.lexicon()) {
      if (e.entity_id != set.original.target_id) expected.insert(e.entity_id);
    }
    for (const CounterfactualVariant& v : set.variants) {
      got.insert(v.example.target_id);
    }
    if (expected != got) {
      throw ValidationError("counterfactual set for '" + set.original.id +
                            "' does not cover the lexicon");
    }
  }
  return sets;
}

}  // namespace thaifactual
