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

#include "thaifactual/metrics.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "thaifactual/error.hpp"
#include "thaifactual/simulator.hpp"

using namespace thaifactual;

namespace {

struct Labeled {
  std::vector<Example> examples;
  PredictionSet preds;
};

// Builds aligned examples/predictions from plain index vectors.
Labeled labeled(const std::vector<int>& gold, const std::vector<int>& pred,
                const std::vector<int>* sentiment = nullptr) {
  Labeled out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    Example ex = testutil::make_example(
        "i" + std::to_string(i), "Marek text", "marek",
        static_cast<StanceLabel>(gold[i]),
        sentiment ? static_cast<SentimentLabel>((*sentiment)[i])
                  : SentimentLabel::kNeutral);
    out.examples.push_back(ex);
    out.preds.add(make_hard_prediction(ex.id,
                                       static_cast<StanceLabel>(pred[i]),
                                       "replay", ""));
  }
  return out;
}

ConfusionCounts counts_for(const std::vector<int>& gold,
                           const std::vector<int>& pred) {
  Labeled l = labeled(gold, pred);
  return confusion_counts(l.examples, l.preds);
}

constexpr int S = 0, A = 1, N = 2;

}  // namespace

TEST_CASE("confusion tabulation hand case") {
  // gold [S,S,A,A,N,N], pred [S,A,A,A,N,S]
  ConfusionCounts counts = counts_for({S, S, A, A, N, N}, {S, A, A, A, N, S});
  CHECK(counts.matrix[S][S] == 1);
  CHECK(counts.matrix[S][A] == 1);
  CHECK(counts.matrix[S][N] == 0);
  CHECK(counts.matrix[A][S] == 0);
  CHECK(counts.matrix[A][A] == 2);
  CHECK(counts.matrix[A][N] == 0);
  CHECK(counts.matrix[N][S] == 1);
  CHECK(counts.matrix[N][A] == 0);
  CHECK(counts.matrix[N][N] == 1);
  CHECK(counts.failed_count == 0);
  CHECK(counts.scored() == 6);
}

TEST_CASE("perfect predictions produce a diagonal matrix") {
  ConfusionCounts counts = counts_for({S, A, N, S}, {S, A, N, S});
  for (int g = 0; g < 3; ++g) {
    for (int p = 0; p < 3; ++p) {
      if (g != p) CHECK(counts.matrix[g][p] == 0);
    }
  }
}

TEST_CASE("empty input gives a zero matrix") {
  ConfusionCounts counts = counts_for({}, {});
  CHECK(counts.scored() == 0);
  CHECK(counts.failed_count == 0);
}

TEST_CASE("a missing prediction id is an alignment error") {
  Labeled l = labeled({S, A}, {S, A});
  std::vector<Example> extra = l.examples;
  extra.push_back(testutil::make_example("unmatched", "Marek", "marek"));
  CHECK_THROWS_AS(confusion_counts(extra, l.preds), ValidationError);
}

TEST_CASE("failed predictions leave the matrix and fill failed_count") {
  Labeled l = labeled({S, A, N}, {S, A, N});
  PredictionSet with_failure;
  for (const PredictionRecord& record : l.preds.records()) {
    if (record.example_id == "i1") {
      PredictionRecord failed;
      failed.example_id = record.example_id;
      failed.failed = true;
      failed.error = "transport";
      with_failure.add(failed);
    } else {
      with_failure.add(record);
    }
  }
  ConfusionCounts counts = confusion_counts(l.examples, with_failure);
  CHECK(counts.failed_count == 1);
  CHECK(counts.scored() == 2);
}

TEST_CASE("rstd is zero for equal recalls, of any common value") {
  // all recalls 1
  CHECK(rstd(counts_for({S, A, N}, {S, A, N})) == 0.0);
  // all recalls 1/2
  CHECK(rstd(counts_for({S, S, A, A, N, N}, {S, A, A, N, N, S})) == 0.0);
}

TEST_CASE("rstd hand cases") {
  // recalls (1.0, 0.5, 0.0)
  ConfusionCounts a =
      counts_for({S, S, A, A, N, N}, {S, S, A, S, S, S});
  CHECK(rstd(a) == doctest::Approx(40.82).epsilon(0.0003));
  // recalls (1.0, 1.0, 0.4)
  ConfusionCounts b = counts_for({S, A, N, N, N, N, N}, {S, A, N, N, A, A, A});
  CHECK(rstd(b) == doctest::Approx(28.28).epsilon(0.0004));
}

TEST_CASE("rstd refuses classes with no gold examples, naming the class") {
  ConfusionCounts counts = counts_for({S, S, N}, {S, S, N});
  try {
    rstd(counts);
    FAIL("expected undefined-recall signal");
  } catch (const UndefinedMetricError& e) {
    CHECK(std::string(e.what()).find("against") != std::string::npos);
  }
}

TEST_CASE("rstd is invariant under class relabeling") {
  std::mt19937 rng(3);
  for (int round = 0; round < 50; ++round) {
    std::vector<int> gold, pred;
    for (int i = 0; i < 30; ++i) {
      gold.push_back(static_cast<int>(rng() % 3));
      pred.push_back(static_cast<int>(rng() % 3));
    }
    for (int cls = 0; cls < 3; ++cls) gold.push_back(cls);  // all present
    for (int cls = 0; cls < 3; ++cls) pred.push_back(cls);

    std::array<int, 3> perm = {0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> gold_p, pred_p;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      gold_p.push_back(perm[gold[i]]);
      pred_p.push_back(perm[pred[i]]);
    }
    CHECK(rstd(counts_for(gold, pred)) ==
          doctest::Approx(rstd(counts_for(gold_p, pred_p))).epsilon(1e-12));
  }
}

TEST_CASE("scaling every confusion cell preserves recalls and rstd exactly") {
  std::mt19937 rng(17);
  for (int round = 0; round < 50; ++round) {
    std::vector<int> gold, pred;
    for (int i = 0; i < 24; ++i) {
      gold.push_back(static_cast<int>(rng() % 3));
      pred.push_back(static_cast<int>(rng() % 3));
    }
    for (int cls = 0; cls < 3; ++cls) {
      gold.push_back(cls);
      pred.push_back(cls);
    }
    // Duplicating the whole sample is a recall-preserving extension.
    std::vector<int> gold2 = gold, pred2 = pred;
    gold2.insert(gold2.end(), gold.begin(), gold.end());
    pred2.insert(pred2.end(), pred.begin(), pred.end());
    CHECK(rstd(counts_for(gold, pred)) == rstd(counts_for(gold2, pred2)));
  }
}

TEST_CASE("bias-ssc is zero for an always-neutral predictor") {
  std::vector<int> sentiment = {0, 0, 1, 1, 2, 2};
  Labeled l = labeled({S, A, S, A, N, N}, {N, N, N, N, N, N}, &sentiment);
  CHECK(bias_ssc(l.examples, l.preds) == 0.0);
}

TEST_CASE("bias-ssc hand case: half the items align") {
  // sentiments [pos,pos,neg,neu], preds [support, against, against, neutral]
  std::vector<int> sentiment = {0, 0, 1, 2};
  Labeled l = labeled({N, N, N, N}, {S, A, A, N}, &sentiment);
  CHECK(bias_ssc(l.examples, l.preds) == 50.0);
}

TEST_CASE("bias-ssc denominator options") {
  std::vector<int> sentiment = {0, 2};
  Labeled l = labeled({N, N}, {S, N}, &sentiment);
  CHECK(bias_ssc(l.examples, l.preds) == 50.0);
  CHECK(bias_ssc(l.examples, l.preds, /*exclude_neutral_sentiment=*/true) ==
        100.0);
}

TEST_CASE("bias-ssc with an empty denominator is undefined") {
  Labeled l = labeled({}, {});
  CHECK_THROWS_AS(bias_ssc(l.examples, l.preds), UndefinedMetricError);
}

TEST_CASE("macro-f1 hand cases") {
  CHECK(macro_f1(counts_for({S, A, N}, {S, A, N})) == 100.0);
  // per-class F1 (0.5, 0.8, 2/3) -> 65.56
  ConfusionCounts counts =
      counts_for({S, S, A, A, N, N}, {S, A, A, A, N, S});
  CHECK(macro_f1(counts) == doctest::Approx(65.56).epsilon(0.0002));
}

TEST_CASE("macro-f1 treats empty classes as undefined unless told otherwise") {
  // neutral appears in neither gold nor predictions
  ConfusionCounts counts = counts_for({S, S, A}, {S, A, A});
  CHECK_THROWS_AS(macro_f1(counts), UndefinedMetricError);
  // remaining classes: F1(S) = 2/3, F1(A) = 2/3
  CHECK(macro_f1(counts, /*skip_empty_classes=*/true) ==
        doctest::Approx(200.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("macro-f1 equals the brute-force oracle on 1000 random instances") {
  std::mt19937 rng(99);
  int compared = 0;
  while (compared < 1000) {
    const int n = 3 + static_cast<int>(rng() % 40);
    std::vector<int> gold, pred;
    for (int i = 0; i < n; ++i) {
      gold.push_back(static_cast<int>(rng() % 3));
      pred.push_back(static_cast<int>(rng() % 3));
    }
    auto expected = oracle::macro_f1(gold, pred);
    if (!expected) {
      CHECK_THROWS_AS(macro_f1(counts_for(gold, pred)), UndefinedMetricError);
      continue;
    }
    // Exact equality: both sides compute 2TP/(2TP+FP+FN) from integer
    // counts and average over three classes.
    CHECK(macro_f1(counts_for(gold, pred)) == *expected);
    ++compared;
  }
}

TEST_CASE("rstd equals the brute-force oracle on 1000 random instances") {
  std::mt19937 rng(7);
  int compared = 0;
  while (compared < 1000) {
    const int n = 3 + static_cast<int>(rng() % 40);
    std::vector<int> gold, pred;
    for (int i = 0; i < n; ++i) {
      gold.push_back(static_cast<int>(rng() % 3));
      pred.push_back(static_cast<int>(rng() % 3));
    }
    auto expected = oracle::rstd(gold, pred);
    if (!expected) {
      CHECK_THROWS_AS(rstd(counts_for(gold, pred)), UndefinedMetricError);
      continue;
    }
    CHECK(rstd(counts_for(gold, pred)) == *expected);
    ++compared;
  }
}

TEST_CASE("metric values ignore example order") {
  std::mt19937 rng(31);
  std::vector<int> gold, pred, sentiment;
  for (int i = 0; i < 60; ++i) {
    gold.push_back(static_cast<int>(rng() % 3));
    pred.push_back(static_cast<int>(rng() % 3));
    sentiment.push_back(static_cast<int>(rng() % 3));
  }
  Labeled l = labeled(gold, pred, &sentiment);
  double f1 = macro_f1(confusion_counts(l.examples, l.preds));
  double ssc = bias_ssc(l.examples, l.preds);

  std::vector<std::size_t> order(gold.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Example> shuffled;
  for (std::size_t i : order) shuffled.push_back(l.examples[i]);
  CHECK(macro_f1(confusion_counts(shuffled, l.preds)) == f1);
  CHECK(bias_ssc(shuffled, l.preds) == ssc);
}

TEST_CASE("evaluate on gold replay collapses to the ideal report") {
  Corpus corpus = testutil::load_bundled_corpus();
  PredictionSet preds;
  for (const Example& ex : corpus.examples()) {
    preds.add(make_hard_prediction(ex.id, ex.stance, "replay", ""));
  }
  MetricReport report = evaluate(corpus, preds);
  CHECK(report.macro_f1 == 100.0);
  CHECK(report.rstd == 0.0);
  // 60 of 270 items intrinsically align (10 per cell, two aligned cells
  // per target).
  CHECK(report.bias_ssc == doctest::Approx(100.0 * 60 / 270).epsilon(1e-12));
  CHECK(report.n_scored == 270);
  CHECK(report.n_failed == 0);
  REQUIRE(report.per_entity.size() == 3);
  for (const auto& [entity, metrics] : report.per_entity) {
    CHECK(metrics.macro_f1 == 100.0);
    CHECK(metrics.rstd == 0.0);
    CHECK(metrics.n_scored == 90);
  }
}

TEST_CASE("evaluate scores only original-provenance rows as gold") {
  Corpus corpus = testutil::load_bundled_corpus();
  Corpus augmented = generate_augmented_corpus(corpus);
  PredictionSet preds;
  for (const Example& ex : augmented.examples()) {
    // Variants get a wrong label on purpose; they must not count.
    StanceLabel label = ex.provenance == Provenance::kOriginal
                            ? ex.stance
                            : (ex.stance == StanceLabel::kSupport
                                   ? StanceLabel::kAgainst
                                   : StanceLabel::kSupport);
    preds.add(make_hard_prediction(ex.id, label, "replay", ""));
  }
  MetricReport report = evaluate(augmented, preds);
  CHECK(report.macro_f1 == 100.0);
  CHECK(report.n_scored == 270);
}

TEST_CASE("metric report json round-trips") {
  Corpus corpus = testutil::load_bundled_corpus();
  PredictionSet preds;
  for (const Example& ex : corpus.examples()) {
    preds.add(make_hard_prediction(ex.id, ex.stance, "replay", ""));
  }
  MetricReport report = evaluate(corpus, preds);
  report.ood_macro_f1 = 91.25;
  report.ood_per_entity = {{"arthit", 90.0}, {"boonmee", 92.5}};
  MetricReport parsed = metric_report_from_json(metric_report_json(report));
  CHECK(parsed.bias_ssc == report.bias_ssc);
  CHECK(parsed.rstd == report.rstd);
  CHECK(parsed.macro_f1 == report.macro_f1);
  CHECK(parsed.ood_macro_f1 == report.ood_macro_f1);
  CHECK(parsed.ood_per_entity == report.ood_per_entity);
  CHECK(parsed.n_scored == report.n_scored);
  CHECK(parsed.per_entity.size() == report.per_entity.size());
}

TEST_CASE("ood protocol: gold replay scores 100 on every fold") {
  Corpus corpus = testutil::load_bundled_corpus();
  PredictionSet preds;
  for (const Example& ex : corpus.examples()) {
    preds.add(make_hard_prediction(ex.id, ex.stance, "replay", ""));
  }
  OodCalibration none;
  OodResult result = ood_evaluate(corpus, preds, none);
  REQUIRE(result.per_entity_macro_f1.size() == 3);
  for (const auto& [entity, f1] : result.per_entity_macro_f1) {
    CHECK(f1 == 100.0);
  }
  CHECK(result.mean == 100.0);
}

TEST_CASE("ood protocol: the biased entity's fold scores strictly lowest") {
  Corpus corpus = testutil::load_bundled_corpus();
  SimulatorConfig config;
  config.leakage_rate = 0.0;
  config.base_accuracy = 1.0;
  config.entity_bias["boonmee"] = {StanceLabel::kAgainst, 0.7};
  config.seed = 5;
  PredictionSet preds = simulate_batch(corpus, config);
  OodCalibration none;
  OodResult result = ood_evaluate(corpus, preds, none);
  CHECK(result.per_entity_macro_f1["boonmee"] <
        result.per_entity_macro_f1["arthit"]);
  CHECK(result.per_entity_macro_f1["boonmee"] <
        result.per_entity_macro_f1["chalida"]);
}

TEST_CASE("ood requires at least two entities") {
  std::vector<EntityEntry> one = {testutil::test_lexicon()[0]};
  Corpus corpus({testutil::make_example("m", "Marek", "marek")}, one);
  PredictionSet preds;
  preds.add(make_hard_prediction("m", StanceLabel::kNeutral, "replay", ""));
  OodCalibration none;
  CHECK_THROWS_AS(ood_evaluate(corpus, preds, none), ValidationError);
}
