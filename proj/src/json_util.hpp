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

// Internal JSON/JSONL helpers shared by the loaders. Not installed.

#ifndef THAIFACTUAL_SRC_JSON_UTIL_HPP_
#define THAIFACTUAL_SRC_JSON_UTIL_HPP_

#include <fstream>
#include <functional>
#include <string>

#include "json.hpp"
#include "thaifactual/error.hpp"

namespace thaifactual::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path);
  return out;
}

// Calls fn(line_number, parsed_object) for every non-blank line. Line
// numbers are 1-based and included in parse errors.
inline void for_each_jsonl(const std::string& path,
                           const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json parsed = Json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": malformed record");
    }
    if (!parsed.is_object()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": record is not an object");
    }
    fn(line_no, parsed);
  }
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  Json parsed = Json::parse(in, nullptr, false);
  if (parsed.is_discarded()) {
    throw ParseError(path + ": malformed JSON document");
  }
  return parsed;
}

inline std::string require_string(const Json& obj, const char* key,
                                  const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw ParseError(where + ": missing or non-string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

}  // namespace thaifactual::detail

#endif  // THAIFACTUAL_SRC_JSON_UTIL_HPP_
