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

#include <fstream>
#include <string>

#include "doctest.h"
#include "thaifactual/error.hpp"

using namespace thaifactual;

TEST_CASE("utf8 validation accepts real text and rejects junk") {
  CHECK(uni::is_valid_utf8("plain ascii"));
  CHECK(uni::is_valid_utf8("ได้ดีมาก"));
  CHECK(uni::is_valid_utf8(""));
  CHECK_FALSE(uni::is_valid_utf8("\xFF\xFE"));
  CHECK_FALSE(uni::is_valid_utf8("\xC0\xAF"));          // overlong
  CHECK_FALSE(uni::is_valid_utf8("\xED\xA0\x80"));      // surrogate
  CHECK_FALSE(uni::is_valid_utf8(std::string("\xE0\xB9", 2)));  // truncated
}

TEST_CASE("nfc composes decomposed Latin and leaves Thai alone") {
  // e + combining acute -> precomposed e-acute
  CHECK(uni::nfc("caf\x65\xCC\x81") == "caf\xC3\xA9");
  const std::string thai = "ได้ดีมาก";
  CHECK(uni::nfc(thai) == thai);
  CHECK_THROWS_AS(uni::nfc("\xFF"), ParseError);
}

TEST_CASE("grapheme boundaries keep Thai combining marks attached") {
  // One cluster: TO DUCK + SARA II
  CHECK(uni::grapheme_count("ดี") == 1);
  // SARA AI | DO DEK + MAI THO: two clusters over nine bytes
  auto b = uni::grapheme_boundaries("ได้");
  CHECK(b == std::vector<std::size_t>{0, 3, 9});
  CHECK(uni::grapheme_count("อาทิตย์") == 5);
  CHECK(uni::grapheme_count("abc") == 3);
  CHECK(uni::grapheme_count("") == 0);
}

TEST_CASE("grapheme boundaries treat CRLF and emoji joins as units") {
  CHECK(uni::grapheme_count("a\r\nb") == 3);
  CHECK(uni::grapheme_count("👍") == 1);
  // family sequence joined by ZWJ
  CHECK(uni::grapheme_count("👨‍👩‍👧") == 1);
}

TEST_CASE("boundary lists are strictly increasing and span the string") {
  for (std::string_view sample :
       {std::string_view("ผมเห็นด้วยกับนโยบายของ อาทิตย์"),
        std::string_view("Arthit did a great job."),
        std::string_view("ฝนตกหนักมาก 👍")}) {
    auto boundaries = uni::grapheme_boundaries(sample);
    REQUIRE(boundaries.front() == 0);
    REQUIRE(boundaries.back() == sample.size());
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
      CHECK(boundaries[i] > boundaries[i - 1]);
    }
  }
}

TEST_CASE("nfc is idempotent over the bundled corpus texts") {
  std::ifstream in(std::string(THAIFACTUAL_DATA_DIR) + "/corpus.jsonl",
                   std::ios::binary);
  REQUIRE(in.good());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::string once = uni::nfc(line);
    CHECK(uni::nfc(once) == once);
  }
}

TEST_CASE("latin letter classification") {
  CHECK(uni::is_latin_letter(U'a'));
  CHECK(uni::is_latin_letter(U'Z'));
  CHECK(uni::is_latin_letter(U'é'));
  CHECK_FALSE(uni::is_latin_letter(U'ก'));
  CHECK_FALSE(uni::is_latin_letter(U'#'));
  CHECK_FALSE(uni::is_latin_letter(U'×'));
}

TEST_CASE("ascii folding and trim") {
  CHECK(uni::ascii_lower("Stance: SUPPORT") == "stance: support");
  CHECK(uni::ascii_lower("ไทย ABC") == "ไทย abc");
  CHECK(uni::trim("  x \t\n") == "x");
  CHECK(uni::trim("\r\n") == "");
}
