/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright (C) 2026 The sop authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SOP_SOP_H
#define SOP_SOP_H

/* C interface to the sop library: Gabor frames, autocorrelation support
 * patterns, and channel identification from delta-train sounding.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns a sop_status;
 * on failure sop_last_error() describes the problem (per thread). Strings
 * returned through char** are heap-allocated and released with
 * sop_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SOP_BUILDING_LIBRARY)
#define SOP_API __declspec(dllexport)
#else
#define SOP_API __declspec(dllimport)
#endif
#else
#define SOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sop_status {
  SOP_OK = 0,
  SOP_ERR_INVALID_ARGUMENT = 1,
  SOP_ERR_PARSE = 2,
  SOP_ERR_IO = 3,
  SOP_ERR_BUDGET_EXCEEDED = 4,
  SOP_ERR_NOT_LEFT_INVERTIBLE = 5,
  SOP_ERR_RESIDUAL_TOO_LARGE = 6,
  SOP_ERR_SINGULAR_SUBFRAME = 7,
  SOP_ERR_SUPPORT_VIOLATION = 8,
  SOP_ERR_COLLISION_MOD_L = 9,
  SOP_ERR_ASYMMETRIC_MASK = 10,
  SOP_ERR_TRAIN_TOO_SHORT = 11,
  SOP_ERR_INSUFFICIENT_EXTENT = 12,
  SOP_ERR_METADATA_MISMATCH = 13,
  SOP_ERR_INTERNAL = 99
} sop_status;

typedef struct sop_window sop_window;
typedef struct sop_pattern sop_pattern;

SOP_API const char* sop_version(void);
SOP_API const char* sop_status_name(sop_status status);
/* Message of the last failed call on this thread; "" if none. */
SOP_API const char* sop_last_error(void);
SOP_API void sop_string_free(char* s);

/* Windows. re_im holds L interleaved (re, im) pairs. */
SOP_API sop_status sop_window_create(const double* re_im, int L, int unimodular, sop_window** out);
SOP_API sop_status sop_window_random(int L, int unimodular, uint64_t seed, sop_window** out);
SOP_API sop_status sop_window_from_json(const char* json, sop_window** out);
SOP_API sop_status sop_window_to_json(const sop_window* w, char** json);
SOP_API int sop_window_length(const sop_window* w);
SOP_API void sop_window_destroy(sop_window* w);

/* Patterns. cells holds count (row, col) pairs of flat indices k * L + n. */
SOP_API sop_status sop_pattern_create(int L, const int* cells, size_t count, sop_pattern** out);
SOP_API sop_status sop_pattern_from_json(const char* json, sop_pattern** out);
SOP_API sop_status sop_pattern_to_json(const sop_pattern* p, char** json);
SOP_API int sop_pattern_L(const sop_pattern* p);
SOP_API size_t sop_pattern_size(const sop_pattern* p);
SOP_API int sop_pattern_is_spd(const sop_pattern* p);
SOP_API void sop_pattern_destroy(sop_pattern* p);

/* Numerical rank of the restricted tensored frame of w on p. */
SOP_API sop_status sop_tensor_rank(const sop_window* w, const sop_pattern* p, int* rank);
/* JSON classification report (verdict, certificate, rank histogram). */
SOP_API sop_status sop_classify(const sop_pattern* p, int trials, uint64_t seed, int jobs, char** report);
SOP_API sop_status sop_count_spd_patterns(int L, int cells, double* count);

/* Batch commands. config is a JSON object whose keys mirror the command
 * line flags; exit_code receives the command's exit code and report its
 * JSON report. The status is SOP_OK unless the command failed. */
SOP_API sop_status sop_run_classify(const char* config, int* exit_code, char** report);
SOP_API sop_status sop_run_atlas(const char* config, int* exit_code, char** report);
SOP_API sop_status sop_run_simulate(const char* config, int* exit_code, char** report);
SOP_API sop_status sop_run_identify(const char* config, int* exit_code, char** report);

#ifdef __cplusplus
}
#endif

#endif /* SOP_SOP_H */
