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

#include "thaifactual/unicode.hpp"

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/ubrk.h>
#include <unicode/unistr.h>
#include <unicode/utext.h>

#include <cstdint>

#include "thaifactual/error.hpp"

namespace thaifactual::uni {

namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || instance == nullptr) {
    throw Error(ErrorKind::kRuntime, "ICU NFC normalizer unavailable");
  }
  return *instance;
}

}  // namespace

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  while (i < s.size()) {
    unsigned char b = byte(i);
    if (b < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    char32_t cp;
    if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char c = byte(i + k);
      if ((c & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (c & 0x3F);
    }
    // Reject overlongs, surrogates and out-of-range scalars.
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

std::string nfc(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) {
    throw ParseError("invalid UTF-8 input");
  }
  icu::UnicodeString u16 = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc_instance().normalize(u16, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kRuntime, "NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<std::size_t> grapheme_boundaries(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) {
    throw ParseError("invalid UTF-8 input");
  }
  std::vector<std::size_t> boundaries;
  boundaries.push_back(0);
  if (utf8.empty()) return boundaries;

  UErrorCode status = U_ZERO_ERROR;
  UText text = UTEXT_INITIALIZER;
  utext_openUTF8(&text, utf8.data(), static_cast<int64_t>(utf8.size()),
                 &status);
  UBreakIterator* iter =
      ubrk_open(UBRK_CHARACTER, "", nullptr, 0, &status);
  if (U_FAILURE(status)) {
    utext_close(&text);
    throw Error(ErrorKind::kRuntime, "ICU break iterator unavailable");
  }
  ubrk_setUText(iter, &text, &status);
  if (U_FAILURE(status)) {
    ubrk_close(iter);
    utext_close(&text);
    throw Error(ErrorKind::kRuntime, "ICU break iterator setup failed");
  }
  // With a UTF-8 UText the iterator's native offsets are byte offsets.
  for (int32_t pos = ubrk_next(iter); pos != UBRK_DONE;
       pos = ubrk_next(iter)) {
    boundaries.push_back(static_cast<std::size_t>(pos));
  }
  ubrk_close(iter);
  utext_close(&text);
  if (boundaries.back() != utf8.size()) boundaries.push_back(utf8.size());
  return boundaries;
}

std::size_t grapheme_count(std::string_view utf8) {
  return grapheme_boundaries(utf8).size() - 1;
}

char32_t decode_codepoint(std::string_view utf8, std::size_t& pos) {
  unsigned char b = static_cast<unsigned char>(utf8[pos]);
  if (b < 0x80) {
    ++pos;
    return b;
  }
  std::size_t len = (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : 4;
  char32_t cp = b & (0xFF >> (len + 1));
  for (std::size_t k = 1; k < len; ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(utf8[pos + k]) & 0x3F);
  }
  pos += len;
  return cp;
}

bool is_latin_letter(char32_t cp) {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z')) return true;
  // Latin-1 Supplement letters and Latin Extended-A/B.
  if (cp >= 0x00C0 && cp <= 0x024F) {
    return cp != 0x00D7 && cp != 0x00F7;  // multiplication/division signs
  }
  return false;
}

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

}  // namespace thaifactual::uni
