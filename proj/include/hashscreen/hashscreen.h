/*
 * Copyright 2026 the hashscreen authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HASHSCREEN_HASHSCREEN_H_
#define HASHSCREEN_HASHSCREEN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HS_BUILDING_LIBRARY)
#define HS_API __attribute__((visibility("default")))
#else
#define HS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Every function returns an hs_status. On failure the calling thread's last
 * error message describes the problem until the next failing call.
 */
typedef enum hs_status {
    HS_OK = 0,
    HS_ERR_INVALID_INPUT = 1,
    HS_ERR_DEGENERATE_INPUT = 2,
    HS_ERR_UNDEFINED_METRIC = 3,
    HS_ERR_SHAPE = 4,
    HS_ERR_PARSE = 5,
    HS_ERR_NOT_FOUND = 6,
    HS_ERR_CORRUPT_DATABASE = 7,
    HS_ERR_DIVERGED = 8,
    HS_ERR_IO = 9,
    HS_ERR_INTERNAL = 10
} hs_status;

typedef enum hs_modality { HS_PROTEIN = 0, HS_MOLECULE = 1 } hs_modality;

/* Hamming ranks codes by distance; cosine ranks by cosine similarity. */
typedef enum hs_mode { HS_MODE_HAMMING = 0, HS_MODE_COSINE = 1 } hs_mode;

typedef enum hs_sweep_kind { HS_SWEEP_LAMBDA = 0, HS_SWEEP_CODE_LENGTH = 1 } hs_sweep_kind;

typedef struct hs_config hs_config;
typedef struct hs_features hs_features;
typedef struct hs_model hs_model;
typedef struct hs_database hs_database;

typedef struct hs_metrics {
    double auroc;
    double bedroc;
    double ef_0_5;
    double ef_1;
    double ef_5;
} hs_metrics;

typedef struct hs_train_summary {
    size_t epochs;
    size_t best_epoch;
    size_t total_steps;
    size_t train_pairs;
    size_t validation_pairs;
    size_t test_pairs;
    hs_metrics validation;
    hs_metrics test;
} hs_train_summary;

typedef struct hs_hit {
    uint64_t index;
    uint32_t distance;
} hs_hit;

typedef struct hs_eval_summary {
    size_t queries;
    size_t skipped;
    hs_metrics mean;
} hs_eval_summary;

typedef struct hs_bench_options {
    uint64_t count;
    size_t code_bits;
    size_t repetitions;
    size_t k;
    uint64_t seed;
    const char* work_dir; /* NULL: the system temporary directory */
    uint64_t real_memory_budget;
    size_t threads; /* 0: HASHSCREEN_THREADS or the hardware concurrency */
} hs_bench_options;

typedef struct hs_bench_report {
    uint64_t count;
    size_t code_bits;
    uint64_t code_payload_bytes;
    uint64_t real_payload_bytes;
    uint64_t database_file_bytes;
    double compression_ratio;
    double hamming_seconds;
    double cosine_seconds;
    double speedup;
    size_t repetitions;
    uint64_t real_resident_records;
    int timed;
} hs_bench_report;

HS_API const char* hs_version(void);
HS_API const char* hs_status_name(hs_status status);
HS_API const char* hs_last_error_message(void);

/* ---- configuration ---- */

HS_API hs_status hs_config_create(hs_config** out);
HS_API hs_status hs_config_load(const char* path, hs_config** out);
HS_API hs_status hs_config_set(hs_config* cfg, const char* key, const char* value);
/* key = value lines for every setting. Copies the NUL-terminated text into
 * buf when it fits; *needed receives its size including the terminator. */
HS_API hs_status hs_config_format(const hs_config* cfg, char* buf, size_t cap, size_t* needed);
HS_API void hs_config_destroy(hs_config* cfg);

/* ---- feature tables ---- */

HS_API hs_status hs_features_load(const char* path, hs_features** out);
HS_API size_t hs_features_count(const hs_features* f);
HS_API size_t hs_features_dim(const hs_features* f);
HS_API const char* hs_features_id(const hs_features* f, size_t row);
HS_API const double* hs_features_row(const hs_features* f, size_t row);
HS_API void hs_features_destroy(hs_features* f);

/* Writes the synthetic dataset described by cfg as two feature TSVs and a
 * label file covering both id sets. */
HS_API hs_status hs_write_synthetic(const hs_config* cfg, const char* protein_path,
                                    const char* molecule_path, const char* labels_path);

/* ---- models ---- */

/* Trains on the configured dataset, saves the selected checkpoint and, when
 * csv_path is not NULL, the per-epoch curve. summary may be NULL. */
HS_API hs_status hs_train(const hs_config* cfg, const char* checkpoint_path, const char* csv_path,
                          hs_train_summary* summary);

HS_API hs_status hs_model_load(const char* path, hs_model** out);
HS_API hs_status hs_model_save(const hs_model* model, const char* path);
HS_API size_t hs_model_code_bits(const hs_model* model);
HS_API size_t hs_model_input_dim(const hs_model* model, hs_modality side);
/* Continuous embedding of one feature vector; out holds code_bits doubles. */
HS_API hs_status hs_model_embed(const hs_model* model, hs_modality side, const double* x,
                                size_t dim, double* out);
/* Packed sign code; out holds ceil(code_bits / 64) words. */
HS_API hs_status hs_model_hash(const hs_model* model, hs_modality side, const double* x, size_t dim,
                               uint64_t* out);
HS_API void hs_model_destroy(hs_model* model);

/* ---- code databases ---- */

/* Encodes every row of a feature TSV and writes a database with ids. */
HS_API hs_status hs_database_encode(const hs_model* model, hs_modality side,
                                    const char* features_path, const char* db_path,
                                    uint64_t* count);
/* Builds a database from an id<TAB>bits file. */
HS_API hs_status hs_database_build(const char* codes_path, const char* db_path, uint64_t* count);

HS_API hs_status hs_database_open(const char* path, hs_database** out);
HS_API uint64_t hs_database_count(const hs_database* db);
HS_API size_t hs_database_code_bits(const hs_database* db);
/* Copies record `index` into out (ceil(code_bits / 64) words). */
HS_API hs_status hs_database_code(const hs_database* db, uint64_t index, uint64_t* out);
/* NULL when the database has no id sidecar. */
HS_API const char* hs_database_id(const hs_database* db, uint64_t index);
/* Exact top-k by Hamming distance, ties by ascending index. out holds k hits;
 * *found receives min(k, count). threads = 0 uses the default. */
HS_API hs_status hs_database_search(const hs_database* db, const uint64_t* query, size_t n_words,
                                    size_t k, size_t threads, hs_hit* out, size_t* found);
HS_API void hs_database_close(hs_database* db);

/* ---- evaluation ---- */

HS_API hs_status hs_metrics_from_scores(const double* scores, const uint8_t* active, size_t n,
                                        double alpha, hs_metrics* out);

/* Screens every query record against every target record. Both databases
 * need id sidecars; labels_path maps ids to groups. csv_path and json_path
 * may be NULL. */
HS_API hs_status hs_eval_databases(const char* queries_db, const char* targets_db,
                                   const char* labels_path, hs_mode mode, double alpha,
                                   const char* csv_path, const char* json_path,
                                   hs_eval_summary* summary);

/* Encodes query proteins and target molecules with the model. Hamming mode
 * screens sign codes; cosine mode screens the continuous embeddings. */
HS_API hs_status hs_eval_features(const hs_model* model, const char* queries_path,
                                  const char* targets_path, const char* labels_path, hs_mode mode,
                                  double alpha, const char* csv_path, const char* json_path,
                                  hs_eval_summary* summary);

/* One train + evaluate run per value, every other setting shared. Failed
 * settings are marked in the CSV and counted in *failures. */
HS_API hs_status hs_sweep(const hs_config* cfg, hs_sweep_kind kind, const double* values, size_t n,
                          const char* csv_path, size_t* failures);

/* ---- benchmark ---- */

HS_API void hs_bench_default_options(hs_bench_options* options);
HS_API hs_status hs_bench(const hs_bench_options* options, hs_bench_report* report);
HS_API hs_status hs_bench_report_json(const hs_bench_report* report, char* buf, size_t cap,
                                      size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* HASHSCREEN_HASHSCREEN_H_ */
