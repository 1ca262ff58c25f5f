/*
 * dimscope C API.
 *
 * Every function returns a dimscope_status. On failure, dimscope_last_error()
 * returns a message for the calling thread until its next API call. Strings
 * handed out through `char** out` parameters are owned by the caller and must
 * be released with dimscope_string_free().
 */
#ifndef DIMSCOPE_DIMSCOPE_H
#define DIMSCOPE_DIMSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DIMSCOPE_BUILDING)
#    define DIMSCOPE_API __declspec(dllexport)
#  else
#    define DIMSCOPE_API __declspec(dllimport)
#  endif
#else
#  define DIMSCOPE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define DIMSCOPE_API_VERSION 1

typedef enum dimscope_status {
  DIMSCOPE_OK = 0,
  DIMSCOPE_ERR_INVALID_ARGUMENT = 1,
  DIMSCOPE_ERR_IO = 2,
  DIMSCOPE_ERR_PARSE = 3,
  DIMSCOPE_ERR_SCHEMA = 4,
  DIMSCOPE_ERR_DEGENERATE = 5,
  DIMSCOPE_ERR_FINGERPRINT_MISMATCH = 6,
  DIMSCOPE_ERR_FORMAT = 7,
  DIMSCOPE_ERR_CLIQUE_EXPLOSION = 8,
  DIMSCOPE_ERR_NO_CATEGORICAL = 9,
  DIMSCOPE_ERR_INVALID_K = 10,
  DIMSCOPE_ERR_VALIDATION = 11,
  DIMSCOPE_ERR_REVISION_CONFLICT = 12,
  DIMSCOPE_ERR_INTERNAL = 13
} dimscope_status;

typedef enum dimscope_metric {
  DIMSCOPE_METRIC_LITERAL = 0,
  DIMSCOPE_METRIC_ABS = 1
} dimscope_metric;

typedef enum dimscope_rule_direction {
  DIMSCOPE_LABEL_TO_RANGE = 0,
  DIMSCOPE_RANGE_TO_LABEL = 1,
  DIMSCOPE_BOTH_DIRECTIONS = 2
} dimscope_rule_direction;

typedef struct dimscope_dataset dimscope_dataset;
typedef struct dimscope_distances dimscope_distances;
typedef struct dimscope_session dimscope_session;

DIMSCOPE_API uint32_t dimscope_api_version(void);
DIMSCOPE_API const char* dimscope_last_error(void);
DIMSCOPE_API const char* dimscope_status_name(dimscope_status status);
DIMSCOPE_API void dimscope_string_free(char* str);

/* Datasets. schema_path may be NULL. */
DIMSCOPE_API dimscope_status dimscope_dataset_load_csv(const char* path, const char* schema_path,
                                                       dimscope_dataset** out);
DIMSCOPE_API dimscope_status dimscope_dataset_parse_csv(const char* text, size_t length,
                                                        const char* schema_json,
                                                        dimscope_dataset** out);
DIMSCOPE_API void dimscope_dataset_free(dimscope_dataset* dataset);
DIMSCOPE_API size_t dimscope_dataset_item_count(const dimscope_dataset* dataset);
DIMSCOPE_API size_t dimscope_dataset_numeric_count(const dimscope_dataset* dataset);
DIMSCOPE_API size_t dimscope_dataset_categorical_count(const dimscope_dataset* dataset);
DIMSCOPE_API uint64_t dimscope_dataset_fingerprint(const dimscope_dataset* dataset);
DIMSCOPE_API dimscope_status dimscope_dataset_meta_json(const dimscope_dataset* dataset,
                                                        char** out);

/* Distance matrices. workers == 0 uses every hardware thread. */
DIMSCOPE_API dimscope_status dimscope_distances_compute(const dimscope_dataset* dataset,
                                                        dimscope_metric metric, unsigned workers,
                                                        dimscope_distances** out);
DIMSCOPE_API dimscope_status dimscope_distances_save(const dimscope_distances* distances,
                                                     const char* path);
DIMSCOPE_API dimscope_status dimscope_distances_load(const char* path,
                                                     const dimscope_dataset* dataset,
                                                     dimscope_distances** out);
DIMSCOPE_API void dimscope_distances_free(dimscope_distances* distances);
DIMSCOPE_API size_t dimscope_distances_size(const dimscope_distances* distances);
/* NaN for pairs without a defined correlation. */
DIMSCOPE_API double dimscope_distances_at(const dimscope_distances* distances, size_t j, size_t k);
DIMSCOPE_API dimscope_metric dimscope_distances_metric(const dimscope_distances* distances);

/* Sessions keep their own references; the dataset and distances may be freed afterwards.
 * config_json may be NULL or "" for defaults. */
DIMSCOPE_API dimscope_status dimscope_session_create(const dimscope_dataset* dataset,
                                                     const dimscope_distances* distances,
                                                     const char* config_json,
                                                     dimscope_session** out);
DIMSCOPE_API void dimscope_session_free(dimscope_session* session);
/* warnings_json (nullable) receives a JSON array of warning strings. */
DIMSCOPE_API dimscope_status dimscope_session_apply_event(dimscope_session* session,
                                                          const char* event_json,
                                                          char** warnings_json);
DIMSCOPE_API uint64_t dimscope_session_revision(const dimscope_session* session);
DIMSCOPE_API dimscope_status dimscope_session_view_json(dimscope_session* session, char** out);
DIMSCOPE_API dimscope_status dimscope_session_snapshot_svg(dimscope_session* session, char** out);

/* Rule mining on one categorical column. distances may be NULL (panels keep id order). */
DIMSCOPE_API dimscope_status dimscope_mine_rules_json(const dimscope_dataset* dataset,
                                                      const char* categorical_label, double t_sup,
                                                      double t_con,
                                                      dimscope_rule_direction direction,
                                                      int bin_count,
                                                      const dimscope_distances* distances,
                                                      char** out);

typedef void (*dimscope_log_fn)(const char* message, void* user);

typedef struct dimscope_serve_options {
  const char* host;         /* NULL -> "127.0.0.1" */
  int port;                 /* 0 -> ephemeral */
  const char* config_json;  /* nullable */
  const char* cache_path;   /* written after a background precompute; nullable */
  const char* static_dir;   /* nullable */
  dimscope_metric metric;   /* used when distances is NULL */
  unsigned workers;
  dimscope_log_fn log;      /* nullable */
  void* log_user;
} dimscope_serve_options;

/* Blocks serving HTTP until the process is terminated. distances may be NULL,
 * in which case they are computed in the background and the API answers 503
 * until ready. */
DIMSCOPE_API dimscope_status dimscope_serve(const dimscope_dataset* dataset,
                                            const dimscope_distances* distances,
                                            const dimscope_serve_options* options);

#ifdef __cplusplus
}
#endif

#endif /* DIMSCOPE_DIMSCOPE_H */
