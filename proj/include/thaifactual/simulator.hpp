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

#ifndef THAIFACTUAL_SIMULATOR_HPP_
#define THAIFACTUAL_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "thaifactual/corpus.hpp"
#include "thaifactual/predictor.hpp"

namespace thaifactual {

// Synthetic predictor with two controllable bias mechanisms: sentiment
// leakage (stance mirrors tone) and per-entity preference (a fixed label is
// forced for a disliked or favored target). It is the verification oracle
// for the metrics and the calibration layer, since live-model numbers are
// not reproducible at desk scale.

struct EntityBiasSpec {
  StanceLabel biased_label = StanceLabel::kAgainst;
  double rate = 0.0;  // in [0, 1]
};

// Which bias fires first when both are configured. The two mechanisms
// co-occur in the wild without a documented composition; leakage-first is
// the default and the order is configurable.
enum class CascadeOrder { kLeakageFirst, kEntityFirst };

struct SimulatorConfig {
  double leakage_rate = 0.5;                       // lambda
  std::map<std::string, EntityBiasSpec> entity_bias;
  double base_accuracy = 0.9;                      // alpha
  std::uint64_t seed = 0;
  CascadeOrder cascade_order = CascadeOrder::kLeakageFirst;

  void validate() const;
};

// Deterministic uniform stream over std::mt19937_64. The engine's output
// sequence is fixed by the standard, and doubles are derived with the plain
// 53-bit construction, so identical seeds reproduce identical predictions
// on any conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n).
  int next_index(int n) {
    int i = static_cast<int>(next_unit() * n);
    return i >= n ? n - 1 : i;
  }

 private:
  std::mt19937_64 engine_;
};

// One draw of the bias cascade:
//   leakage stage:    with probability lambda, emit the sentiment-mapped
//                     stance (positive->support, negative->against,
//                     neutral->neutral)
//   entity stage:     else, with the target's bias rate, emit its biased
//                     label
//   base stage:       else, with probability alpha emit the gold stance,
//                     otherwise one of the two non-gold labels uniformly
PredictionRecord simulate_prediction(const Example& example,
                                     const SimulatorConfig& config,
                                     RandomStream& stream);

// Applies the cascade in corpus order from a single stream seeded with
// config.seed; deterministic per (corpus, config). Sequential on purpose:
// parallel draws would break reproducibility.
PredictionSet simulate_batch(const Corpus& corpus,
                             const SimulatorConfig& config);

}  // namespace thaifactual

#endif  // THAIFACTUAL_SIMULATOR_HPP_
