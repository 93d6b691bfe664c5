//
// Copyright 2026 The HCGR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

/* C interface to the HCGR library. Every call returns an hcgr_status; on
 * failure hcgr_last_error() holds a message for the calling thread. Strings
 * handed out through char** parameters are owned by the caller and released
 * with hcgr_string_free. */

#ifndef HCGR_HCGR_H_
#define HCGR_HCGR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HCGR_API __declspec(dllexport)
#else
#define HCGR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hcgr_status {
  HCGR_OK = 0,
  HCGR_CHECK_FAILED = 1,
  HCGR_INPUT_ERROR = 2, /* bad arguments, malformed files, I/O */
  HCGR_NUMERIC_ERROR = 3
} hcgr_status;

typedef struct hcgr_config hcgr_config;
typedef struct hcgr_dataset hcgr_dataset;
typedef struct hcgr_model hcgr_model;

HCGR_API const char* hcgr_last_error(void);
HCGR_API void hcgr_string_free(char* s);

/* Config: built-in defaults, then a key=value file, then explicit sets. */
HCGR_API hcgr_status hcgr_config_new(hcgr_config** out);
HCGR_API void hcgr_config_free(hcgr_config* cfg);
HCGR_API int hcgr_config_is_known(const char* key);
HCGR_API hcgr_status hcgr_config_set(hcgr_config* cfg, const char* key, const char* value);
HCGR_API hcgr_status hcgr_config_load(hcgr_config* cfg, const char* path);
HCGR_API hcgr_status hcgr_config_get(const hcgr_config* cfg, const char* key, char** value);
HCGR_API hcgr_status hcgr_config_render(const hcgr_config* cfg, char** text);

/* Writes a synthetic hierarchical session log. */
HCGR_API hcgr_status hcgr_synth_write(size_t n_items, size_t n_sessions, uint64_t seed, const char* path);

/* Reads a session log and filters/splits it using min_item_freq,
 * min_session_len, max_session_len, all_prefixes and seed from cfg. */
HCGR_API hcgr_status hcgr_dataset_prepare(const char* log_path, const hcgr_config* cfg, hcgr_dataset** out);
HCGR_API hcgr_status hcgr_dataset_load(const char* path, hcgr_dataset** out);
HCGR_API hcgr_status hcgr_dataset_save(const hcgr_dataset* ds, const char* path);
HCGR_API void hcgr_dataset_free(hcgr_dataset* ds);
HCGR_API size_t hcgr_dataset_num_items(const hcgr_dataset* ds);
/* split is "train", "valid" or "test"; returns 0 for anything else. */
HCGR_API size_t hcgr_dataset_split_size(const hcgr_dataset* ds, const char* split);
HCGR_API hcgr_status hcgr_dataset_stats(const hcgr_dataset* ds, char** text);

/* A freshly initialised model sized to the dataset catalog, seeded by cfg. */
HCGR_API hcgr_status hcgr_model_create(const hcgr_config* cfg, const hcgr_dataset* ds, hcgr_model** out);
HCGR_API hcgr_status hcgr_model_load(const char* path, hcgr_model** out);
HCGR_API hcgr_status hcgr_model_save(const hcgr_model* model, const char* path);
HCGR_API void hcgr_model_free(hcgr_model* model);
HCGR_API size_t hcgr_model_catalog_size(const hcgr_model* model);

/* Next-item distribution for a session of dense item ids. probs must hold
 * hcgr_model_catalog_size(model) doubles. */
HCGR_API hcgr_status hcgr_model_predict(const hcgr_model* model, const uint32_t* session, size_t len, double* probs);

typedef struct hcgr_train_summary {
  size_t best_epoch;
  size_t epochs_run;
  int stopped_early;
  double best_valid_mrr20;
} hcgr_train_summary;

/* Called once per finished epoch with the formatted log line. */
typedef void (*hcgr_epoch_fn)(const char* line, void* user);

/* Trains in place and leaves the best validation epoch's parameters in the
 * model. summary may be NULL. */
HCGR_API hcgr_status hcgr_train(hcgr_model* model, const hcgr_dataset* ds, const hcgr_config* cfg,
                                hcgr_epoch_fn on_epoch, void* user, hcgr_train_summary* summary);

/* Ranking metrics on a split as CSV (split,K,hit_rate,ndcg,mrr,n). */
HCGR_API hcgr_status hcgr_evaluate(const hcgr_model* model, const hcgr_dataset* ds, const char* split,
                                   const size_t* ks, size_t n_ks, size_t threads, char** csv);

/* Writes hierarchy.csv, embeddings.csv and attention.csv into out_dir, with
 * attention traces for the first max_sessions test sessions. */
HCGR_API hcgr_status hcgr_analyze(const hcgr_model* model, const hcgr_dataset* ds, const char* out_dir,
                                  size_t max_sessions);

/* level: 0 quick, 1 full. fault: 0 none, 1 perturbed exponential map.
 * Returns HCGR_CHECK_FAILED when any check fails; report is set either way. */
HCGR_API hcgr_status hcgr_check(int level, int fault, char** report);

#ifdef __cplusplus
}
#endif

#endif /* HCGR_HCGR_H_ */
