/*
 * Copyright 2026 The ThaiFACTUAL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the ThaiFACTUAL stance-bias audit and calibration library.
 *
 * Conventions:
 *   - Every function returns a tf_status; TF_OK means success.
 *   - On failure, tf_last_error() returns a message for the calling thread.
 *   - Out-parameters are written only on TF_OK.
 *   - Objects returned through tf_*_new/load/... are owned by the caller
 *     and released with the matching tf_*_free. Strings returned through
 *     char** out-parameters are released with tf_string_free.
 *   - Structured configuration is passed as JSON text; the schemas are
 *     documented in the project README.
 */

#ifndef THAIFACTUAL_H_
#define THAIFACTUAL_H_

#include <stddef.h>
#include <stdint.h>

#ifndef TF_API
#if defined(_WIN32)
#ifdef TF_BUILDING
#define TF_API __declspec(dllexport)
#else
#define TF_API __declspec(dllimport)
#endif
#elif defined(__GNUC__)
#define TF_API __attribute__((visibility("default")))
#else
#define TF_API
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tf_status {
  TF_OK = 0,
  TF_ERROR_VALIDATION = 1, /* input data violates an invariant       */
  TF_ERROR_RUNTIME = 2,    /* transport, IO or internal failure      */
  TF_ERROR_CONFIG = 3,     /* bad or missing configuration           */
  TF_ERROR_PARSE = 4,      /* malformed input file                   */
  TF_ERROR_UNDEFINED = 5   /* metric undefined on this input         */
} tf_status;

typedef struct tf_corpus tf_corpus;
typedef struct tf_predictions tf_predictions;
typedef struct tf_calibrator tf_calibrator;

/* Message for the most recent failure on this thread; never NULL. */
TF_API const char* tf_last_error(void);

TF_API const char* tf_version(void);

TF_API void tf_string_free(char* s);

/* ---- corpus ---------------------------------------------------------- */

TF_API tf_status tf_corpus_load(const char* corpus_path, const char* lexicon_path,
                         tf_corpus** out);
TF_API void tf_corpus_free(tf_corpus* corpus);
TF_API size_t tf_corpus_size(const tf_corpus* corpus);
TF_API size_t tf_corpus_entity_count(const tf_corpus* corpus);
TF_API tf_status tf_corpus_save(const tf_corpus* corpus, const char* path);

/* Per-target stance/sentiment counts with imbalance flags, as JSON. */
TF_API tf_status tf_corpus_balance_report(const tf_corpus* corpus, size_t tolerance,
                                   char** out_json);

/* Leave-one-entity-out partition; both halves keep the full lexicon. */
TF_API tf_status tf_corpus_split(const tf_corpus* corpus, const char* held_out,
                          tf_corpus** out_fit, tf_corpus** out_eval);

/* Fleiss' kappa over a line-delimited {item_id, labels[]} file. Returns
 * TF_ERROR_UNDEFINED when chance agreement is 1. */
TF_API tf_status tf_fleiss_kappa_file(const char* annotations_path, double* out);

/* ---- counterfactual generation -------------------------------------- */

/* Originals plus entity-swapped variants, variants following their source. */
TF_API tf_status tf_generate_counterfactuals(const tf_corpus* corpus,
                                      tf_corpus** out_augmented);

/* ---- predictions ----------------------------------------------------- */

TF_API tf_status tf_predictions_load(const char* path, tf_predictions** out);
TF_API tf_status tf_predictions_save(const tf_predictions* predictions,
                              const char* path);
TF_API void tf_predictions_free(tf_predictions* predictions);
TF_API size_t tf_predictions_size(const tf_predictions* predictions);

/* Union of two prediction sets; duplicate example ids are an error. */
TF_API tf_status tf_predictions_merge(const tf_predictions* a,
                               const tf_predictions* b, tf_predictions** out);

/* Seeded synthetic predictor; config_json follows the simulator schema
 * {leakage_rate, base_accuracy, entity_bias, seed, cascade_order}. */
TF_API tf_status tf_simulate(const tf_corpus* corpus, const char* config_json,
                      tf_predictions** out);

/* Replay or remote chat predictor; config_json follows the predictor
 * schema {backend, replay_path | endpoint+model+..., cache, ...}. For the
 * chat backend, prompt_name/prompt_path select the template file. */
TF_API tf_status tf_predict(const tf_corpus* corpus, const char* config_json,
                     const char* prompt_name, const char* prompt_path,
                     tf_predictions** out);

/* ---- calibration ------------------------------------------------------ */

/* Fits the multinomial re-scorer on the original examples of an augmented
 * corpus. train_json: {learning_rate, epochs, l2, seed, tolerance};
 * polarity_lexicon_path may be NULL. */
TF_API tf_status tf_fit_calibrator(const tf_corpus* augmented,
                            const tf_predictions* predictions,
                            const char* train_json,
                            const char* polarity_lexicon_path,
                            tf_calibrator** out);
TF_API tf_status tf_calibrator_save(const tf_calibrator* model, const char* path);
TF_API tf_status tf_calibrator_load(const char* path, tf_calibrator** out);
TF_API void tf_calibrator_free(tf_calibrator* model);

/* Re-scores the originals of an augmented corpus. With a NULL model the
 * deterministic consensus fallback at threshold tau is used. */
TF_API tf_status tf_calibrate(const tf_corpus* augmented,
                       const tf_predictions* predictions,
                       const tf_calibrator* model_or_null, double tau,
                       const char* polarity_lexicon_path,
                       tf_predictions** out);

/* ---- evaluation ------------------------------------------------------- */

/* options_json (may be NULL): {skip_empty_classes, exclude_neutral_sentiment,
 * ood, ood_mode: "none"|"consensus"|"fitted", tau, train{...},
 * polarity_lexicon}. Emits a metric report as JSON. */
TF_API tf_status tf_evaluate(const tf_corpus* corpus,
                      const tf_predictions* predictions,
                      const char* options_json, char** out_report_json);

/* ---- reporting and orchestration -------------------------------------- */

/* rows_json: array of {name, report (metric report JSON object) | bias_ssc/
 * rstd/macro_f1/ood, notes}. format: "markdown" or "csv". */
TF_API tf_status tf_render_leaderboard(const char* rows_json, const char* format,
                                char** out_document);

/* Full pipeline from a config file; overrides_json (may be NULL) accepts
 * {seed, out_dir}. Returns the run summary as JSON. */
TF_API tf_status tf_run_pipeline(const char* config_path, const char* overrides_json,
                          char** out_summary_json);

#ifdef __cplusplus
}
#endif

#endif /* THAIFACTUAL_H_ */
