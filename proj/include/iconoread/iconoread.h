/* Copyright 2026 The Iconoread Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* C interface to the iconoread engine.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns an icr_status;
 * on failure icr_last_error() describes the problem for the calling thread.
 * Strings returned through char** outputs are heap-allocated and must be
 * released with icr_string_free().
 */

#ifndef ICONOREAD_ICONOREAD_H_
#define ICONOREAD_ICONOREAD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ICR_API __declspec(dllexport)
#else
#define ICR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum icr_status {
  ICR_OK = 0,
  ICR_ERR_INVALID_ARGUMENT = 1,
  ICR_ERR_PARSE = 2,
  ICR_ERR_SCHEMA = 3,
  ICR_ERR_VALIDATION = 4,
  ICR_ERR_EMPTY_MASK = 5,
  ICR_ERR_DIMENSION_MISMATCH = 6,
  ICR_ERR_IMAGE_UNREADABLE = 7,
  ICR_ERR_PROVIDER_UNAVAILABLE = 8,
  ICR_ERR_PROTOCOL = 9,
  ICR_ERR_DATABASE = 10,
  ICR_ERR_MANIFEST = 11,
  ICR_ERR_MISSING_TRUTH = 12,
  ICR_ERR_ID_MISMATCH = 13,
  ICR_ERR_IO = 14,
  ICR_ERR_INTERNAL = 15
} icr_status;

typedef struct icr_config icr_config;
typedef struct icr_database icr_database;
typedef struct icr_analysis icr_analysis;
typedef struct icr_report icr_report;

ICR_API const char* icr_version(void);
ICR_API const char* icr_status_name(icr_status status);
/* Message of the last failed call on this thread; "" if none. */
ICR_API const char* icr_last_error(void);
ICR_API void icr_string_free(char* s);

/* ---- configuration ---- */

/* Built-in defaults; the provider comes from ICONOREAD_PROVIDER when set. */
ICR_API icr_status icr_config_create(icr_config** out);
ICR_API void icr_config_destroy(icr_config* config);
/* Overlays a JSON config file; relative paths resolve against its directory. */
ICR_API icr_status icr_config_load_file(icr_config* config, const char* path);
ICR_API icr_status icr_config_set_target_pixels(icr_config* config, int64_t n);
ICR_API icr_status icr_config_set_retention_threshold(icr_config* config,
                                                      double threshold);
ICR_API icr_status icr_config_set_retention_max(icr_config* config, int max_count);
ICR_API icr_status icr_config_set_merge_distance(icr_config* config, double d);
ICR_API icr_status icr_config_set_database_path(icr_config* config, const char* path);
ICR_API icr_status icr_config_use_fixture_provider(icr_config* config);
ICR_API icr_status icr_config_use_subprocess_provider(icr_config* config,
                                                      const char* executable);

/* ---- association database ---- */

ICR_API icr_status icr_database_load(const char* path, icr_database** out);
ICR_API void icr_database_destroy(icr_database* db);
ICR_API const char* icr_database_version(const icr_database* db);
/* Number of candidate saints for an attribute; 0 when unknown. */
ICR_API size_t icr_database_candidate_count(const icr_database* db,
                                            const char* attribute);
/* Borrowed pointer valid for the database's lifetime. */
ICR_API icr_status icr_database_candidate(const icr_database* db,
                                          const char* attribute, size_t index,
                                          const char** saint, double* prior);

/* Validates a database file. On ICR_OK, *findings receives one finding per
 * line and *error_count the number of error-severity findings. Unreadable
 * or malformed documents fail with ICR_ERR_IO / ICR_ERR_PARSE. */
ICR_API icr_status icr_db_validate(const char* path, char** findings,
                                   size_t* error_count);

/* ---- single image ---- */

/* fixture, overlay_path, image_id and db may be NULL. A NULL db loads the
 * configured database. */
ICR_API icr_status icr_analyze(const icr_config* config, const icr_database* db,
                               const char* image_path, const char* fixture,
                               const char* overlay_path, const char* image_id,
                               icr_analysis** out);
ICR_API void icr_analysis_destroy(icr_analysis* analysis);
ICR_API icr_status icr_analysis_to_json(const icr_analysis* analysis, char** json);
ICR_API size_t icr_analysis_figure_count(const icr_analysis* analysis);
ICR_API size_t icr_analysis_assignment_count(const icr_analysis* analysis);
/* Borrowed pointers valid for the analysis' lifetime. */
ICR_API icr_status icr_analysis_assignment(const icr_analysis* analysis,
                                           size_t index, int* figure_id,
                                           const char** saint,
                                           const char** attribute);

/* ---- corpus evaluation ---- */

/* jobs == 0 uses the available parallelism; readings_dir may be NULL. */
ICR_API icr_status icr_evaluate(const icr_config* config, const char* manifest,
                                const char* truth, unsigned jobs,
                                const char* readings_dir, icr_report** out);
ICR_API void icr_report_destroy(icr_report* report);
ICR_API icr_status icr_report_to_json(const icr_report* report, char** json);
ICR_API icr_status icr_report_to_table(const icr_report* report, char** table);
ICR_API size_t icr_report_error_count(const icr_report* report);
ICR_API size_t icr_report_saint_count(const icr_report* report);
/* precision / recall are NaN when undefined (zero denominator). */
ICR_API icr_status icr_report_saint(const icr_report* report, size_t index,
                                    const char** saint, int64_t* tp, int64_t* fp,
                                    int64_t* fn, double* precision, double* recall);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* ICONOREAD_ICONOREAD_H_ */
