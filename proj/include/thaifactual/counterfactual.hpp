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

#ifndef THAIFACTUAL_COUNTERFACTUAL_HPP_
#define THAIFACTUAL_COUNTERFACTUAL_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "thaifactual/corpus.hpp"

namespace thaifactual {

// Counterfactual generation swaps the target entity (names and pronouns)
// while leaving every other byte of the text untouched, so that a matched
// original/variant pair differs only in who is being talked about.
//
// Matching is exact substring over NFC grapheme clusters. Tokens whose edge
// characters are Latin additionally require a non-letter neighbor, so an
// alias "Anan" does not fire inside "Ananda" and "his" does not fire inside
// "this". Thai script carries no word delimiters, so Thai-edged tokens
// match as plain substrings. No fuzzy matching of any kind: edit-distance
// style matching could corrupt tone-bearing Thai text.

enum class SpanKind {
  kAlias,
  kPronounSubject,
  kPronounObject,
  kPronounPossessive,
};

std::string_view to_string(SpanKind kind);

// A located mention. Offsets are extended grapheme cluster indices into the
// text the span was computed for; end is exclusive.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string matched_alias;  // surface form occupying [start, end)
  std::string entity_id;
  SpanKind kind = SpanKind::kAlias;

  bool operator==(const EntitySpan&) const = default;
};

struct CounterfactualVariant {
  Example example;  // provenance = counterfactual, source_id set
  std::string swapped_from;
  std::string swapped_to;
  // Spans of the replacement tokens, in variant-text cluster offsets.
  std::vector<EntitySpan> edited_spans;
};

struct CounterfactualSet {
  Example original;
  std::vector<CounterfactualVariant> variants;  // one per other entity
};

// All mentions of `target` in `text`: alias occurrences (longest match
// first, leftmost first on ties, non-overlapping) plus pronoun tokens from
// the target's pronoun map. Pronoun matching is ASCII-case-insensitive so
// sentence-initial forms are found. Result is sorted by start offset.
std::vector<EntitySpan> find_entity_spans(
    std::string_view text, const std::vector<EntityEntry>& lexicon,
    std::string_view target);

// Rewrites `example` so it talks about `to` instead of its current target.
// Alias spans become the canonical name of `to`; pronoun spans map through
// `to`'s pronoun table slot-for-slot, mirroring the first letter's case for
// Latin script. The rationale, when present and mentioning the target, is
// rewritten the same way. Throws if the example is not an original, if the
// swap is an identity, or if the text never mentions the target.
CounterfactualVariant substitute_entity(const Example& example,
                                        const std::vector<EntityEntry>& lexicon,
                                        std::string_view to);

// One variant per lexicon entity other than the example's target.
CounterfactualSet generate_counterfactual_set(
    const Example& example, const std::vector<EntityEntry>& lexicon);

// Replaces every alias span with the target's own canonical name. Pronouns
// are untouched. Used to bring a text into the canonical-mention form on
// which substitution round-trips are exact.
Example canonicalize_mentions(const Example& example,
                              const std::vector<EntityEntry>& lexicon);

// Id given to the variant of `source_id` swapped to entity `to`.
std::string counterfactual_id(std::string_view source_id, std::string_view to);

// Original corpus -> originals plus variants, each original immediately
// followed by its variants in lexicon order.
Corpus generate_augmented_corpus(const Corpus& corpus);

// Rebuilds the original/variant pairing from an augmented corpus, checking
// that every set covers exactly the other lexicon entities.
std::vector<CounterfactualSet> group_counterfactual_sets(
    const Corpus& augmented);

}  // namespace thaifactual

#endif  // THAIFACTUAL_COUNTERFACTUAL_HPP_
