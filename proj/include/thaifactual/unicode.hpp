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

#ifndef THAIFACTUAL_UNICODE_HPP_
#define THAIFACTUAL_UNICODE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace thaifactual::uni {

// All corpus text is handled as NFC-normalized UTF-8, and all span offsets
// are extended grapheme cluster offsets. Thai combining marks (vowels above
// and below, tone marks) must never be split from their base consonant, so
// byte and code point offsets are unsuitable as the public unit.

bool is_valid_utf8(std::string_view s);

// NFC normalization. Throws ParseError on invalid UTF-8.
std::string nfc(std::string_view utf8);

// Byte offsets of extended grapheme cluster boundaries, always starting at 0
// and ending at utf8.size(). A string of n clusters yields n+1 offsets.
std::vector<std::size_t> grapheme_boundaries(std::string_view utf8);

std::size_t grapheme_count(std::string_view utf8);

// Decodes the code point starting at byte offset `pos`; advances `pos` past
// it. Input must be valid UTF-8.
char32_t decode_codepoint(std::string_view utf8, std::size_t& pos);

// Latin letters (ASCII plus the Latin-1/Extended ranges). Used for word
// boundary checks around Latin-script tokens; Thai script has no word
// delimiters, so no such check is possible there.
bool is_latin_letter(char32_t cp);

bool is_ascii_digit(char32_t cp);

// ASCII-only case folding, used for case-insensitive pronoun and keyword
// matching. Non-ASCII bytes pass through untouched.
std::string ascii_lower(std::string_view s);

// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace thaifactual::uni

#endif  // THAIFACTUAL_UNICODE_HPP_
