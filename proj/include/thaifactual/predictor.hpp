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

#ifndef THAIFACTUAL_PREDICTOR_HPP_
#define THAIFACTUAL_PREDICTOR_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thaifactual/corpus.hpp"
#include "thaifactual/labels.hpp"

namespace thaifactual {

// Prompt templates are data, not code: the three prompting conditions
// (raw, debias, cot) ship as editable text files with {text} and {target}
// placeholders, each required exactly once.
struct PromptTemplate {
  std::string name;
  std::string text;
};

PromptTemplate make_prompt_template(std::string name, std::string text);
PromptTemplate load_prompt_template(const std::string& name,
                                    const std::string& path);

std::string render_prompt(const PromptTemplate& tpl, const Example& example,
                          const std::vector<EntityEntry>& lexicon);

// A predictor's output for one input. Hard-label backends produce one-hot
// distributions so every consumer sees a single shape. Failed predictions
// (transport or parse failures) stay in the list, marked, and are excluded
// from metric denominators downstream.
struct PredictionRecord {
  std::string example_id;
  std::array<double, 3> distribution = {0.0, 0.0, 0.0};
  StanceLabel argmax = StanceLabel::kSupport;
  std::string backend;
  std::string prompt_hash;
  std::optional<std::string> raw_response;
  bool failed = false;
  std::string error;
};

// Argmax under the fixed tie-break order support < against < neutral.
StanceLabel distribution_argmax(const std::array<double, 3>& distribution);

PredictionRecord make_hard_prediction(std::string example_id,
                                      StanceLabel label, std::string backend,
                                      std::string prompt_hash);

// Prediction records keyed by example id; duplicates are a hard error.
class PredictionSet {
 public:
  PredictionSet() = default;

  void add(PredictionRecord record);
  const PredictionRecord* find(std::string_view example_id) const;
  const std::vector<PredictionRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  // Line-delimited records. `load` also accepts the bare replay forms
  // {example_id, label} and {example_id, distribution[3]}.
  static PredictionSet load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::vector<PredictionRecord> records_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

// Scans for the first stance keyword, case-insensitive for the English set
// {support, against, neutral} and exact for the Thai set
// {สนับสนุน, คัดค้าน, เป็นกลาง}. No keyword means parse failure, reported
// as nullopt and never defaulted.
std::optional<StanceLabel> parse_stance_response(std::string_view raw);

struct PredictorConfig {
  std::string backend;  // "replay" | "chat" | "simulator"
  // chat backend
  std::string endpoint;  // e.g. "http://localhost:8089"
  std::string request_path = "/v1/chat/completions";
  std::string model;
  double temperature = 0.0;  // deterministic mode is enforced
  int max_in_flight = 4;
  int retries = 2;
  int retry_backoff_ms = 200;
  std::string api_key_env = "THAIFACTUAL_API_KEY";
  std::string cache_path;  // empty = in-memory cache only
  bool trace = false;
  // replay backend
  std::string replay_path;

  void validate() const;
};

// Append-only response cache. The on-disk form is line-delimited
// {key, raw_response, timestamp}; on load, later entries win. All access is
// serialized, and batch execution deduplicates in-flight keys so concurrent
// misses on one key cost a single network call.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::string path);

  std::optional<std::string> lookup(const std::string& key);
  void store(const std::string& key, const std::string& raw_response);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
  std::string path_;
};

std::string cache_key(std::string_view backend, std::string_view model,
                      std::string_view prompt);

// Anything that turns a prompt into a raw completion. Implementations may
// be called from several threads at once.
class StanceBackend {
 public:
  virtual ~StanceBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
  virtual std::string model() const = 0;
};

std::unique_ptr<StanceBackend> make_chat_backend(const PredictorConfig& config);

// Runs the backend over `examples` with at most config.max_in_flight
// concurrent requests. Output order equals input order regardless of
// completion order. Every request consults the cache first and cache misses
// are written back, so a warm cache makes the call bit-reproducible with
// zero network traffic. Per-example failures (after retries) are recorded,
// not thrown.
std::vector<PredictionRecord> predict_batch(
    StanceBackend& backend, std::span<const Example> examples,
    const std::vector<EntityEntry>& lexicon, const PromptTemplate& tpl,
    const PredictorConfig& config, ResponseCache& cache);

// Replays predictions from a file; an example with no replay entry yields a
// failed record.
std::vector<PredictionRecord> replay_batch(std::span<const Example> examples,
                                           const PredictionSet& replay);

}  // namespace thaifactual

#endif  // THAIFACTUAL_PREDICTOR_HPP_
