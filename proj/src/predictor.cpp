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

#include "thaifactual/predictor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include "json_util.hpp"
#include "thaifactual/error.hpp"
#include "thaifactual/sha256.hpp"
#include "thaifactual/unicode.hpp"

#include "httplib.h"

namespace thaifactual {

using detail::Json;
using detail::OrderedJson;

namespace {

constexpr double kDistributionTolerance = 1e-9;

void count_placeholder(const std::string& text, const std::string& token,
                       const std::string& name) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(token); pos != std::string::npos;
       pos = text.find(token, pos + token.size())) {
    ++count;
  }
  if (count != 1) {
    throw ConfigError("prompt template '" + name + "': placeholder " + token +
                      " must appear exactly once (found " +
                      std::to_string(count) + ")");
  }
}

std::string replace_once(std::string text, const std::string& token,
                         const std::string& value) {
  std::size_t pos = text.find(token);
  text.replace(pos, token.size(), value);
  return text;
}

void validate_distribution(const std::array<double, 3>& distribution,
                           const std::string& example_id) {
  double sum = 0.0;
  for (double p : distribution) {
    if (!(p >= 0.0)) {
      throw ValidationError("prediction for '" + example_id +
                            "': negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw ValidationError("prediction for '" + example_id +
                          "': distribution sums to " + std::to_string(sum));
  }
}

}  // namespace

PromptTemplate make_prompt_template(std::string name, std::string text) {
  if (name != "raw" && name != "debias" && name != "cot") {
    throw ConfigError("prompt template name must be raw, debias or cot, got '" +
                      name + "'");
  }
  count_placeholder(text, "{text}", name);
  count_placeholder(text, "{target}", name);
  return PromptTemplate{std::move(name), std::move(text)};
}

PromptTemplate load_prompt_template(const std::string& name,
                                    const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return make_prompt_template(name, std::move(text));
}

std::string render_prompt(const PromptTemplate& tpl, const Example& example,
                          const std::vector<EntityEntry>& lexicon) {
  const EntityEntry* entity = nullptr;
  for (const EntityEntry& e : lexicon) {
    if (e.entity_id == example.target_id) entity = &e;
  }
  if (entity == nullptr) {
    throw ValidationError("example '" + example.id +
                          "': unresolved target '" + example.target_id + "'");
  }
  std::string prompt = replace_once(tpl.text, "{text}", example.text);
  return replace_once(std::move(prompt), "{target}", entity->canonical);
}

StanceLabel distribution_argmax(const std::array<double, 3>& distribution) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (distribution[i] > distribution[best]) best = i;
  }
  return static_cast<StanceLabel>(best);
}

PredictionRecord make_hard_prediction(std::string example_id,
                                      StanceLabel label, std::string backend,
                                      std::string prompt_hash) {
  PredictionRecord record;
  record.example_id = std::move(example_id);
  record.distribution = {0.0, 0.0, 0.0};
  record.distribution[static_cast<int>(label)] = 1.0;
  record.argmax = label;
  record.backend = std::move(backend);
  record.prompt_hash = std::move(prompt_hash);
  return record;
}

void PredictionSet::add(PredictionRecord record) {
  if (by_id_.count(record.example_id)) {
    throw ValidationError("duplicate prediction for example '" +
                          record.example_id + "'");
  }
  by_id_.emplace(record.example_id, records_.size());
  records_.push_back(std::move(record));
}

const PredictionRecord* PredictionSet::find(std::string_view example_id) const {
  auto it = by_id_.find(example_id);
  if (it == by_id_.end()) return nullptr;
  return &records_[it->second];
}

PredictionSet PredictionSet::load(const std::string& path) {
  PredictionSet set;
  detail::for_each_jsonl(path, [&](std::size_t line_no, const Json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    PredictionRecord record;
    record.example_id = detail::require_string(obj, "example_id", where);
    record.backend = obj.value("backend", std::string("replay"));
    record.prompt_hash = obj.value("prompt_hash", std::string());
    if (obj.value("failed", false)) {
      record.failed = true;
      record.error = obj.value("error", std::string("failed"));
      set.add(std::move(record));
      return;
    }
    if (obj.contains("label")) {
      auto label = parse_stance_label(obj["label"].get<std::string>());
      if (!label) {
        throw ValidationError(where + ": unknown stance label '" +
                              obj["label"].get<std::string>() + "'");
      }
      record.distribution[static_cast<int>(*label)] = 1.0;
      record.argmax = *label;
    } else if (obj.contains("distribution")) {
      const Json& dist = obj["distribution"];
      if (!dist.is_array() || dist.size() != 3) {
        throw ParseError(where + ": distribution must have 3 entries");
      }
      for (int i = 0; i < 3; ++i) {
        record.distribution[i] = dist[i].get<double>();
      }
      validate_distribution(record.distribution, record.example_id);
      record.argmax = distribution_argmax(record.distribution);
      if (obj.contains("argmax")) {
        auto stated = parse_stance_label(obj["argmax"].get<std::string>());
        if (!stated || *stated != record.argmax) {
          throw ValidationError(where +
                                ": stated argmax is inconsistent with the "
                                "distribution under the fixed tie order");
        }
      }
    } else {
      throw ParseError(where + ": record needs 'label' or 'distribution'");
    }
    if (obj.contains("raw_response") && obj["raw_response"].is_string()) {
      record.raw_response = obj["raw_response"].get<std::string>();
    }
    set.add(std::move(record));
  });
  return set;
}

void PredictionSet::save(const std::string& path) const {
  std::ofstream out = detail::open_output(path);
  for (const PredictionRecord& record : records_) {
    OrderedJson obj;
    obj["example_id"] = record.example_id;
    if (record.failed) {
      obj["failed"] = true;
      obj["error"] = record.error;
    } else {
      obj["distribution"] = record.distribution;
      obj["argmax"] = to_string(record.argmax);
    }
    obj["backend"] = record.backend;
    obj["prompt_hash"] = record.prompt_hash;
    if (record.raw_response) obj["raw_response"] = *record.raw_response;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::optional<StanceLabel> parse_stance_response(std::string_view raw) {
  struct Keyword {
    std::string_view token;
    StanceLabel label;
    bool fold;
  };
  static const Keyword kKeywords[] = {
      {"support", StanceLabel::kSupport, true},
      {"against", StanceLabel::kAgainst, true},
      {"neutral", StanceLabel::kNeutral, true},
      {"สนับสนุน", StanceLabel::kSupport, false},
      {"คัดค้าน", StanceLabel::kAgainst, false},
      {"เป็นกลาง", StanceLabel::kNeutral, false},
  };
  const std::string folded = uni::ascii_lower(raw);
  std::size_t best_pos = std::string::npos;
  std::optional<StanceLabel> best;
  for (const Keyword& kw : kKeywords) {
    std::size_t pos = kw.fold ? folded.find(kw.token) : std::string::npos;
    if (!kw.fold) pos = std::string_view(raw).find(kw.token);
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      best = kw.label;
    }
  }
  return best;
}

void PredictorConfig::validate() const {
  if (backend != "replay" && backend != "chat" && backend != "simulator") {
    throw ConfigError("unknown predictor backend '" + backend + "'");
  }
  if (temperature != 0.0) {
    throw ConfigError(
        "temperature must be 0.0: deterministic decoding is enforced");
  }
  if (max_in_flight < 1) {
    throw ConfigError("max_in_flight must be >= 1");
  }
  if (retries < 0) {
    throw ConfigError("retries must be >= 0");
  }
  if (backend == "chat" && endpoint.empty()) {
    throw ConfigError("chat backend requires an endpoint URL");
  }
  if (backend == "replay" && replay_path.empty()) {
    throw ConfigError("replay backend requires replay_path");
  }
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // first run: the file appears on the first store
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json obj = Json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw ParseError(path_ + ":" + std::to_string(line_no) +
                       ": malformed cache record");
    }
    entries_[obj.at("key").get<std::string>()] =
        obj.at("raw_response").get<std::string>();
  }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::store(const std::string& key,
                          const std::string& raw_response) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[key] = raw_response;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to cache file: " + path_);
  OrderedJson obj;
  obj["key"] = key;
  obj["raw_response"] = raw_response;
  obj["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
  out << obj.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

std::string cache_key(std::string_view backend, std::string_view model,
                      std::string_view prompt) {
  std::string material;
  material.reserve(backend.size() + model.size() + prompt.size() + 2);
  material.append(backend);
  material.push_back('\n');
  material.append(model);
  material.push_back('\n');
  material.append(prompt);
  return sha256_hex(material);
}

namespace {

class ChatBackend : public StanceBackend {
 public:
  explicit ChatBackend(const PredictorConfig& config)
      : endpoint_(config.endpoint),
        request_path_(config.request_path),
        model_(config.model),
        trace_(config.trace) {
    if (const char* key = std::getenv(config.api_key_env.c_str())) {
      api_key_ = key;
    }
  }

  std::string complete(const std::string& prompt) override {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key_);
    }
    Json body = {
        {"model", model_},
        {"temperature", 0.0},
        {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
    };
    const std::string payload = body.dump();
    if (trace_) {
      std::cerr << "[trace] POST " << endpoint_ << request_path_
                << " authorization=" << (api_key_.empty() ? "none" : "Bearer <redacted>")
                << " body=" << payload << "\n";
    }
    auto result = client.Post(request_path_, headers, payload,
                              "application/json");
    if (!result) {
      throw IoError("chat transport error: " +
                    httplib::to_string(result.error()));
    }
    if (trace_) {
      std::cerr << "[trace] status=" << result->status
                << " body=" << result->body << "\n";
    }
    if (result->status != 200) {
      throw IoError("chat endpoint returned HTTP " +
                    std::to_string(result->status));
    }
    Json response = Json::parse(result->body, nullptr, false);
    if (response.is_discarded()) {
      throw ParseError("chat endpoint returned malformed JSON");
    }
    try {
      return response.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const Json::exception&) {
      throw ParseError("chat response missing choices[0].message.content");
    }
  }

  std::string name() const override { return "chat"; }
  std::string model() const override { return model_; }

 private:
  std::string endpoint_;
  std::string request_path_;
  std::string model_;
  std::string api_key_;
  bool trace_;
};

}  // namespace

std::unique_ptr<StanceBackend> make_chat_backend(
    const PredictorConfig& config) {
  return std::make_unique<ChatBackend>(config);
}

std::vector<PredictionRecord> predict_batch(
    StanceBackend& backend, std::span<const Example> examples,
    const std::vector<EntityEntry>& lexicon, const PromptTemplate& tpl,
    const PredictorConfig& config, ResponseCache& cache) {
  config.validate();

  const std::size_t n = examples.size();
  std::vector<std::string> prompts(n);
  std::vector<std::string> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    prompts[i] = render_prompt(tpl, examples[i], lexicon);
    keys[i] = cache_key(backend.name(), backend.model(), prompts[i]);
  }

  // Deduplicate by cache key: identical rendered prompts share one entry and
  // therefore at most one network call.
  std::map<std::string, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < n; ++i) by_key[keys[i]].push_back(i);

  struct Fetch {
    std::string key;
    std::string prompt;
  };
  std::vector<Fetch> misses;
  for (const auto& [key, indices] : by_key) {
    if (!cache.lookup(key)) {
      misses.push_back(Fetch{key, prompts[indices.front()]});
    }
  }

  std::map<std::string, std::string> fetch_errors;
  std::mutex errors_mutex;
  if (!misses.empty()) {
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min<std::size_t>(
        static_cast<std::size_t>(config.max_in_flight), misses.size());
    auto work = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= misses.size()) return;
        const Fetch& fetch = misses[i];
        std::string last_error;
        for (int attempt = 0; attempt <= config.retries; ++attempt) {
          if (attempt > 0 && config.retry_backoff_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(
                config.retry_backoff_ms * (1 << (attempt - 1))));
          }
          try {
            std::string raw = backend.complete(fetch.prompt);
            cache.store(fetch.key, raw);
            last_error.clear();
            break;
          } catch (const std::exception& e) {
            last_error = e.what();
          }
        }
        if (!last_error.empty()) {
          std::lock_guard<std::mutex> lock(errors_mutex);
          fetch_errors[fetch.key] = last_error;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // Assemble in input order regardless of completion order.
  std::vector<PredictionRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string prompt_hash = sha256_hex(prompts[i]);
    std::optional<std::string> raw = cache.lookup(keys[i]);
    if (!raw) {
      PredictionRecord record;
      record.example_id = examples[i].id;
      record.backend = backend.name();
      record.prompt_hash = prompt_hash;
      record.failed = true;
      auto it = fetch_errors.find(keys[i]);
      record.error = it != fetch_errors.end() ? it->second : "no response";
      records.push_back(std::move(record));
      continue;
    }
    std::optional<StanceLabel> label = parse_stance_response(*raw);
    if (!label) {
      PredictionRecord record;
      record.example_id = examples[i].id;
      record.backend = backend.name();
      record.prompt_hash = prompt_hash;
      record.raw_response = raw;
      record.failed = true;
      record.error = "unparseable response: no stance keyword found";
      records.push_back(std::move(record));
      continue;
    }
    PredictionRecord record = make_hard_prediction(
        examples[i].id, *label, backend.name(), prompt_hash);
    record.raw_response = raw;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<PredictionRecord> replay_batch(std::span<const Example> examples,
                                           const PredictionSet& replay) {
  std::vector<PredictionRecord> records;
  records.reserve(examples.size());
  for (const Example& ex : examples) {
    const PredictionRecord* found = replay.find(ex.id);
    if (found == nullptr) {
      PredictionRecord record;
      record.example_id = ex.id;
      record.backend = "replay";
      record.prompt_hash = sha256_hex("replay\n" + ex.id);
      record.failed = true;
      record.error = "no replay entry for this example";
      records.push_back(std::move(record));
      continue;
    }
    PredictionRecord record = *found;
    if (record.prompt_hash.empty()) {
      record.prompt_hash = sha256_hex("replay\n" + ex.id);
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace thaifactual
