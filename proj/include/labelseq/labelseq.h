// include/labelseq/labelseq.h

// Copyright 2026 The labelseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the label-sequence search engine.
 *
 * Every function returning lsq_status leaves a message for the calling
 * thread in lsq_last_error() when it fails. Strings handed out through
 * `char **` parameters belong to the caller and are released with
 * lsq_string_free(). Handles are released with their _free function; passing
 * NULL to any _free function is a no-op.
 */
#ifndef LABELSEQ_LABELSEQ_H_
#define LABELSEQ_LABELSEQ_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LSQ_BUILDING_LIBRARY)
#define LSQ_API __attribute__((visibility("default")))
#else
#define LSQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum {
  LSQ_OK = 0,
  LSQ_USAGE = 1,    /* bad arguments or configuration */
  LSQ_DATA = 2,     /* unreadable or malformed data, model or mapping files */
  LSQ_BACKEND = 3,  /* model backend or transport failure */
  LSQ_INTERNAL = 4
} lsq_status;

typedef struct lsq_config lsq_config;
typedef struct lsq_model lsq_model;

LSQ_API const char *lsq_version(void);
LSQ_API const char *lsq_last_error(void);
/* Pipeline stage of the last failure ("load", "generate", ...), or "". */
LSQ_API const char *lsq_last_error_stage(void);
LSQ_API void lsq_string_free(char *s);

/* Configuration documents (JSON). Relative paths inside a loaded file are
 * resolved against the file's directory. */
LSQ_API lsq_status lsq_config_new(lsq_config **out);
LSQ_API lsq_status lsq_config_load(const char *path, lsq_config **out);
LSQ_API lsq_status lsq_config_parse(const char *json_text, lsq_config **out);
/* Sets a dotted key ("search.beam_width") to a JSON value ("12",
 * "\"tsv\"", "true"). Intermediate objects are created as needed. */
LSQ_API lsq_status lsq_config_set(lsq_config *config, const char *key,
                                  const char *json_value);
LSQ_API lsq_status lsq_config_to_json(const lsq_config *config, char **out);
LSQ_API void lsq_config_free(lsq_config *config);

/* Beam-search candidates per class into out_dir/candidates.jsonl. */
LSQ_API lsq_status lsq_generate(const lsq_config *config, const char *out_dir,
                                char **summary_json);
/* Re-ranks a candidates file (NULL: out_dir/candidates.jsonl) and writes
 * reranked.jsonl and the top-n mappings.jsonl. */
LSQ_API lsq_status lsq_rerank(const lsq_config *config, const char *candidates_path,
                              const char *out_dir, char **summary_json);
/* Full pipeline; writes all artifacts to out_dir and returns the report. */
LSQ_API lsq_status lsq_search(const lsq_config *config, const char *out_dir,
                              char **report_json);
/* Scores a mapping file with a classifier checkpoint (NULL: the configured
 * classifier) on split "dev", "train" or "all". */
LSQ_API lsq_status lsq_eval(const lsq_config *config, const char *mapping_path,
                            const char *checkpoint_path, const char *split,
                            char **result_json);
/* Conformance probe of a model server. LSQ_OK means the probe ran; the
 * verdict is the "passed" field of the result. */
LSQ_API lsq_status lsq_serve_check(const char *endpoint, char **result_json);

/* Direct model access. backend: "tabular", "tiny-neural" or "remote". */
LSQ_API lsq_status lsq_model_open(const char *backend, const char *location,
                                  lsq_model **out);
LSQ_API size_t lsq_model_vocab_size(const lsq_model *model);
/* Writes up to `capacity` ids; *length receives the full count. */
LSQ_API lsq_status lsq_model_tokenize(const lsq_model *model, const char *text,
                                      int32_t *ids, size_t capacity, size_t *length);
/* input_text must contain the "[MASK]" placeholder once. out has
 * lsq_model_vocab_size() entries; excluded tokens get -INFINITY. */
LSQ_API lsq_status lsq_model_next_token_logprobs(const lsq_model *model,
                                                 const char *input_text,
                                                 const int32_t *prefix,
                                                 size_t prefix_length, double *out,
                                                 size_t out_length);
LSQ_API lsq_status lsq_model_sequence_logprob(const lsq_model *model,
                                              const char *input_text,
                                              const int32_t *target,
                                              size_t target_length, double *out);
LSQ_API void lsq_model_free(lsq_model *model);

#ifdef __cplusplus
}
#endif

#endif /* LABELSEQ_LABELSEQ_H_ */
