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

#ifndef THAIFACTUAL_ERROR_HPP_
#define THAIFACTUAL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace thaifactual {

// Error taxonomy. The CLI maps kinds to exit codes and the C API maps them
// to status codes, so every throw site picks the kind deliberately:
//   validation  - input data violates a documented invariant
//   parse       - input data is syntactically malformed
//   config      - a configuration value is missing or out of range
//   io          - a file could not be read or written
//   undefined   - a metric is undefined on this input (e.g. chance
//                 agreement of 1, or a class with no gold examples)
//   runtime     - everything else
enum class ErrorKind {
  kValidation,
  kParse,
  kConfig,
  kIo,
  kUndefined,
  kRuntime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorKind::kParse, m) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorKind::kConfig, m) {}
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

// Signals "this metric has no defined value here" distinctly from a bad
// input; callers may catch it and report the metric as unavailable.
struct UndefinedMetricError : Error {
  explicit UndefinedMetricError(const std::string& m)
      : Error(ErrorKind::kUndefined, m) {}
};

}  // namespace thaifactual

#endif  // THAIFACTUAL_ERROR_HPP_
