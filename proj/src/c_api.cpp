// Copyright 2026 the hashscreen authors
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

#include "hashscreen/hashscreen.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "hashscreen/codedb.hpp"
#include "hashscreen/config.hpp"
#include "hashscreen/dataio.hpp"
#include "hashscreen/encoder.hpp"
#include "hashscreen/error.hpp"
#include "hashscreen/metrics.hpp"
#include "hashscreen/parallel.hpp"
#include "hashscreen/pipeline.hpp"
#include "hashscreen/trainer.hpp"

using namespace hashscreen;

struct hs_config {
    RunConfig config;
};

struct hs_features {
    FeatureTable table;
};

struct hs_model {
    DualEncoder model;
};

struct hs_database {
    CodeDatabase db;
    std::vector<std::string> ids;
};

namespace {

thread_local std::string g_last_error;

hs_status status_of(ErrorType t) {
    switch (t) {
        case ErrorType::kInvalidInput: return HS_ERR_INVALID_INPUT;
        case ErrorType::kDegenerateInput: return HS_ERR_DEGENERATE_INPUT;
        case ErrorType::kUndefinedMetric: return HS_ERR_UNDEFINED_METRIC;
        case ErrorType::kShapeMismatch: return HS_ERR_SHAPE;
        case ErrorType::kParse: return HS_ERR_PARSE;
        case ErrorType::kNotFound: return HS_ERR_NOT_FOUND;
        case ErrorType::kCorruptDatabase: return HS_ERR_CORRUPT_DATABASE;
        case ErrorType::kTrainingDiverged: return HS_ERR_DIVERGED;
        case ErrorType::kIo: return HS_ERR_IO;
    }
    return HS_ERR_INTERNAL;
}

template <class F>
hs_status guard(F&& f) {
    try {
        f();
        return HS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.type());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return HS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HS_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return HS_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) {
        fail(ErrorType::kInvalidInput, std::string(what) + " must not be null");
    }
}

Modality modality_of(hs_modality side) {
    if (side != HS_PROTEIN && side != HS_MOLECULE) {
        fail(ErrorType::kInvalidInput, "unknown modality");
    }
    return side == HS_PROTEIN ? Modality::kProtein : Modality::kMolecule;
}

ScreenMode mode_of(hs_mode mode) {
    if (mode != HS_MODE_HAMMING && mode != HS_MODE_COSINE) {
        fail(ErrorType::kInvalidInput, "unknown evaluation mode");
    }
    return mode == HS_MODE_HAMMING ? ScreenMode::kHamming : ScreenMode::kCosine;
}

hs_metrics to_c(const MetricReport& r) {
    return hs_metrics{r.auroc, r.bedroc, r.ef_0_5, r.ef_1, r.ef_5};
}

void copy_text(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
    if (needed != nullptr) {
        *needed = text.size() + 1;
    }
    if (buf != nullptr && cap > text.size()) {
        std::memcpy(buf, text.c_str(), text.size() + 1);
    } else if (buf != nullptr || needed == nullptr) {
        fail(ErrorType::kInvalidInput, "buffer too small: need " + std::to_string(text.size() + 1) +
                                           " bytes");
    }
}

void check_input_dim(const EncoderParams& params, std::size_t dim, const std::string& what) {
    if (dim != params.input_dim()) {
        fail(ErrorType::kShapeMismatch, what + " has " + std::to_string(dim) +
                                            " features, the encoder expects " +
                                            std::to_string(params.input_dim()));
    }
}

std::vector<BinaryCode> hash_rows(const Matrix& embeddings) {
    std::vector<BinaryCode> codes;
    codes.reserve(embeddings.rows);
    for (std::size_t i = 0; i < embeddings.rows; ++i) {
        codes.push_back(sign_quantize(embeddings.row(i)));
    }
    return codes;
}

Matrix embed_table(const EncoderParams& params, const FeatureTable& t, const std::string& what) {
    if (t.values.rows == 0) {
        return Matrix(0, params.output_dim());
    }
    check_input_dim(params, t.values.cols, what);
    return encode_batch(params, t.values, default_thread_count());
}

void finish_eval(const ScreenOutcome& out, const std::string& mode, const char* csv_path,
                 const char* json_path, hs_eval_summary* summary) {
    if (out.queries.empty()) {
        fail(ErrorType::kUndefinedMetric,
             "no query has both active and inactive targets (" + std::to_string(out.skipped) +
                 " skipped)");
    }
    if (csv_path != nullptr) {
        write_metrics_csv(csv_path, out.queries);
    }
    if (json_path != nullptr) {
        write_metrics_json(json_path, out.queries, mode, out.skipped);
    }
    if (summary != nullptr) {
        summary->queries = out.queries.size();
        summary->skipped = out.skipped;
        summary->mean = to_c(mean_report(out.queries));
    }
}

std::vector<std::string> concat(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

extern "C" {

const char* hs_version(void) { return "0.1.0"; }

const char* hs_status_name(hs_status status) {
    switch (status) {
        case HS_OK: return "ok";
        case HS_ERR_INVALID_INPUT: return "invalid_input";
        case HS_ERR_DEGENERATE_INPUT: return "degenerate_input";
        case HS_ERR_UNDEFINED_METRIC: return "undefined_metric";
        case HS_ERR_SHAPE: return "shape";
        case HS_ERR_PARSE: return "parse";
        case HS_ERR_NOT_FOUND: return "not_found";
        case HS_ERR_CORRUPT_DATABASE: return "corrupt_database";
        case HS_ERR_DIVERGED: return "diverged";
        case HS_ERR_IO: return "io";
        case HS_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* hs_last_error_message(void) { return g_last_error.c_str(); }

hs_status hs_config_create(hs_config** out) {
    return guard([&] {
        require(out, "out");
        *out = new hs_config{};
    });
}

hs_status hs_config_load(const char* path, hs_config** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        auto cfg = load_run_config(path);
        *out = new hs_config{std::move(cfg)};
    });
}

hs_status hs_config_set(hs_config* cfg, const char* key, const char* value) {
    return guard([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        apply_setting(cfg->config, key, value);
    });
}

hs_status hs_config_format(const hs_config* cfg, char* buf, size_t cap, size_t* needed) {
    return guard([&] {
        require(cfg, "config");
        copy_text(format_run_config(cfg->config), buf, cap, needed);
    });
}

void hs_config_destroy(hs_config* cfg) { delete cfg; }

hs_status hs_features_load(const char* path, hs_features** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        auto table = load_features(path);
        *out = new hs_features{std::move(table)};
    });
}

size_t hs_features_count(const hs_features* f) { return f ? f->table.values.rows : 0; }
size_t hs_features_dim(const hs_features* f) { return f ? f->table.values.cols : 0; }

const char* hs_features_id(const hs_features* f, size_t row) {
    return f && row < f->table.ids.size() ? f->table.ids[row].c_str() : nullptr;
}

const double* hs_features_row(const hs_features* f, size_t row) {
    return f && row < f->table.values.rows ? f->table.values.row(row).data() : nullptr;
}

void hs_features_destroy(hs_features* f) { delete f; }

hs_status hs_write_synthetic(const hs_config* cfg, const char* protein_path,
                             const char* molecule_path, const char* labels_path) {
    return guard([&] {
        require(cfg, "config");
        require(protein_path, "protein_path");
        require(molecule_path, "molecule_path");
        const auto d = generate_synthetic(cfg->config.synthetic);
        write_features(protein_path, FeatureTable{d.protein_ids, d.proteins});
        write_features(molecule_path, FeatureTable{d.molecule_ids, d.molecules});
        if (labels_path != nullptr) {
            std::vector<std::int64_t> labels(d.labels);
            labels.insert(labels.end(), d.labels.begin(), d.labels.end());
            write_labels(labels_path, concat(d.protein_ids, d.molecule_ids), labels);
        }
    });
}

hs_status hs_train(const hs_config* cfg, const char* checkpoint_path, const char* csv_path,
                   hs_train_summary* summary) {
    return guard([&] {
        require(cfg, "config");
        require(checkpoint_path, "checkpoint_path");
        const auto r = run_experiment(cfg->config);
        save_checkpoint(checkpoint_path, r.training.best);
        if (csv_path != nullptr) {
            write_training_csv(csv_path, r.training.curve);
        }
        if (summary != nullptr) {
            summary->epochs = r.training.curve.size();
            summary->best_epoch = r.training.best_epoch;
            summary->total_steps = r.training.total_steps;
            summary->train_pairs = r.train_pairs;
            summary->validation_pairs = r.validation_pairs;
            summary->test_pairs = r.test_pairs;
            summary->validation = to_c(r.validation);
            summary->test = to_c(r.test);
        }
    });
}

hs_status hs_model_load(const char* path, hs_model** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        auto m = load_checkpoint(path);
        *out = new hs_model{std::move(m)};
    });
}

hs_status hs_model_save(const hs_model* model, const char* path) {
    return guard([&] {
        require(model, "model");
        require(path, "path");
        save_checkpoint(path, model->model);
    });
}

size_t hs_model_code_bits(const hs_model* model) {
    return model ? model->model.protein.output_dim() : 0;
}

size_t hs_model_input_dim(const hs_model* model, hs_modality side) {
    if (model == nullptr || (side != HS_PROTEIN && side != HS_MOLECULE)) {
        return 0;
    }
    return model->model.side(modality_of(side)).input_dim();
}

hs_status hs_model_embed(const hs_model* model, hs_modality side, const double* x, size_t dim,
                         double* out) {
    return guard([&] {
        require(model, "model");
        require(x, "x");
        require(out, "out");
        const auto& params = model->model.side(modality_of(side));
        check_input_dim(params, dim, "input vector");
        const auto y = encode(params, std::span<const double>(x, dim));
        std::memcpy(out, y.data(), y.size() * sizeof(double));
    });
}

hs_status hs_model_hash(const hs_model* model, hs_modality side, const double* x, size_t dim,
                        uint64_t* out) {
    return guard([&] {
        require(model, "model");
        require(x, "x");
        require(out, "out");
        const auto& params = model->model.side(modality_of(side));
        check_input_dim(params, dim, "input vector");
        const auto code = sign_quantize(encode(params, std::span<const double>(x, dim)));
        std::memcpy(out, code.words().data(), code.n_words() * sizeof(std::uint64_t));
    });
}

void hs_model_destroy(hs_model* model) { delete model; }

hs_status hs_database_encode(const hs_model* model, hs_modality side, const char* features_path,
                             const char* db_path, uint64_t* count) {
    return guard([&] {
        require(model, "model");
        require(features_path, "features_path");
        require(db_path, "db_path");
        const auto& params = model->model.side(modality_of(side));
        const auto table = load_features(features_path);
        const auto embeddings = embed_table(params, table, features_path);
        DatabaseWriter writer(db_path, params.output_dim(), true);
        const auto codes = hash_rows(embeddings);
        for (std::size_t i = 0; i < codes.size(); ++i) {
            writer.append(codes[i], table.ids[i]);
        }
        writer.finish();
        if (count != nullptr) {
            *count = writer.count();
        }
    });
}

hs_status hs_database_build(const char* codes_path, const char* db_path, uint64_t* count) {
    return guard([&] {
        require(codes_path, "codes_path");
        require(db_path, "db_path");
        const auto table = load_code_table(codes_path);
        if (table.codes.empty()) {
            fail(ErrorType::kInvalidInput,
                 std::string("no codes in ") + codes_path + "; the code length is unknown");
        }
        const auto db = build_database(db_path, table.codes.front().n_bits(), table.codes, table.ids);
        if (count != nullptr) {
            *count = db.count();
        }
    });
}

hs_status hs_database_open(const char* path, hs_database** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        auto db = CodeDatabase::open(path);
        auto ids = db.load_ids();
        *out = new hs_database{std::move(db), std::move(ids)};
    });
}

uint64_t hs_database_count(const hs_database* db) { return db ? db->db.count() : 0; }
size_t hs_database_code_bits(const hs_database* db) { return db ? db->db.code_bits() : 0; }

hs_status hs_database_code(const hs_database* db, uint64_t index, uint64_t* out) {
    return guard([&] {
        require(db, "database");
        require(out, "out");
        const auto code = db->db.code(index);
        std::memcpy(out, code.words().data(), code.n_words() * sizeof(std::uint64_t));
    });
}

const char* hs_database_id(const hs_database* db, uint64_t index) {
    return db && index < db->ids.size() ? db->ids[index].c_str() : nullptr;
}

hs_status hs_database_search(const hs_database* db, const uint64_t* query, size_t n_words, size_t k,
                             size_t threads, hs_hit* out, size_t* found) {
    return guard([&] {
        require(db, "database");
        require(query, "query");
        require(found, "found");
        if (n_words != db->db.words_per_code()) {
            fail(ErrorType::kInvalidInput, "query has " + std::to_string(n_words) +
                                                " words, the database stores " +
                                                std::to_string(db->db.words_per_code()));
        }
        const auto code = BinaryCode::from_words(db->db.code_bits(),
                                                 std::vector<std::uint64_t>(query, query + n_words));
        ScanOptions opts;
        opts.threads = threads;
        const auto hits = topk_hamming(db->db, code, k, opts);
        if (!hits.empty()) {
            require(out, "out");
        }
        for (std::size_t i = 0; i < hits.size(); ++i) {
            out[i] = hs_hit{hits[i].index, hits[i].distance};
        }
        *found = hits.size();
    });
}

void hs_database_close(hs_database* db) { delete db; }

hs_status hs_metrics_from_scores(const double* scores, const uint8_t* active, size_t n, double alpha,
                                 hs_metrics* out) {
    return guard([&] {
        require(out, "out");
        if (n > 0) {
            require(scores, "scores");
            require(active, "active");
        }
        const auto r = Ranking::from_scores(std::span<const double>(scores, n),
                                            std::span<const std::uint8_t>(active, n));
        *out = to_c(evaluate_ranking(r, alpha));
    });
}

hs_status hs_eval_databases(const char* queries_db, const char* targets_db, const char* labels_path,
                            hs_mode mode, double alpha, const char* csv_path, const char* json_path,
                            hs_eval_summary* summary) {
    return guard([&] {
        require(queries_db, "queries_db");
        require(targets_db, "targets_db");
        require(labels_path, "labels_path");
        const auto screen_mode = mode_of(mode);
        const auto q = CodeDatabase::open(queries_db);
        const auto t = CodeDatabase::open(targets_db);
        if (q.code_bits() != t.code_bits()) {
            fail(ErrorType::kShapeMismatch, "query codes have " + std::to_string(q.code_bits()) +
                                                " bits, target codes have " +
                                                std::to_string(t.code_bits()));
        }
        const auto q_ids = q.load_ids();
        const auto t_ids = t.load_ids();
        if (q_ids.size() != q.count() || t_ids.size() != t.count()) {
            fail(ErrorType::kInvalidInput, "evaluation needs databases with id sidecars");
        }
        const auto labels = load_labels(labels_path);
        const auto out = screen_codes(q_ids, q.codes(), t_ids, t.codes(), labels, screen_mode, alpha);
        finish_eval(out, mode == HS_MODE_HAMMING ? "hamming" : "cosine", csv_path, json_path,
                    summary);
    });
}

hs_status hs_eval_features(const hs_model* model, const char* queries_path,
                           const char* targets_path, const char* labels_path, hs_mode mode,
                           double alpha, const char* csv_path, const char* json_path,
                           hs_eval_summary* summary) {
    return guard([&] {
        require(model, "model");
        require(queries_path, "queries_path");
        require(targets_path, "targets_path");
        require(labels_path, "labels_path");
        const auto screen_mode = mode_of(mode);
        const auto q = load_features(queries_path);
        const auto t = load_features(targets_path);
        const auto labels = load_labels(labels_path);
        const auto qe = embed_table(model->model.protein, q, queries_path);
        const auto te = embed_table(model->model.molecule, t, targets_path);
        ScreenOutcome out;
        if (screen_mode == ScreenMode::kHamming) {
            out = screen_codes(q.ids, hash_rows(qe), t.ids,
                               hash_rows(te), labels, ScreenMode::kHamming,
                               alpha);
        } else {
            out = screen_embeddings(q.ids, qe, t.ids, te, labels, alpha);
        }
        finish_eval(out, screen_mode == ScreenMode::kHamming ? "hamming" : "cosine", csv_path,
                    json_path, summary);
    });
}

hs_status hs_sweep(const hs_config* cfg, hs_sweep_kind kind, const double* values, size_t n,
                   const char* csv_path, size_t* failures) {
    return guard([&] {
        require(cfg, "config");
        require(csv_path, "csv_path");
        if (n == 0) {
            fail(ErrorType::kInvalidInput, "sweep needs at least one value");
        }
        require(values, "values");
        if (kind != HS_SWEEP_LAMBDA && kind != HS_SWEEP_CODE_LENGTH) {
            fail(ErrorType::kInvalidInput, "unknown sweep kind");
        }
        const auto rows = run_sweep(cfg->config,
                                    kind == HS_SWEEP_LAMBDA ? SweepKind::kLambda : SweepKind::kCodeLength,
                                    std::span<const double>(values, n));
        write_sweep_csv(csv_path, rows);
        if (failures != nullptr) {
            std::size_t f = 0;
            for (const auto& r : rows) {
                f += r.ok ? 0 : 1;
            }
            *failures = f;
        }
    });
}

void hs_bench_default_options(hs_bench_options* options) {
    if (options == nullptr) {
        return;
    }
    const BenchOptions d;
    options->count = d.count;
    options->code_bits = d.code_bits;
    options->repetitions = d.repetitions;
    options->k = d.k;
    options->seed = d.seed;
    options->work_dir = nullptr;
    options->real_memory_budget = d.real_memory_budget;
    options->threads = 0;
}

hs_status hs_bench(const hs_bench_options* options, hs_bench_report* report) {
    return guard([&] {
        require(options, "options");
        require(report, "report");
        BenchOptions o;
        o.count = options->count;
        o.code_bits = options->code_bits;
        o.repetitions = options->repetitions;
        o.k = options->k;
        o.seed = options->seed;
        if (options->work_dir != nullptr) {
            o.work_dir = options->work_dir;
        }
        o.real_memory_budget = options->real_memory_budget;
        o.scan.threads = options->threads;
        const auto r = bench(o);
        *report = hs_bench_report{r.count,
                                  r.code_bits,
                                  r.code_payload_bytes,
                                  r.real_payload_bytes,
                                  r.database_file_bytes,
                                  r.compression_ratio,
                                  r.hamming_seconds,
                                  r.cosine_seconds,
                                  r.speedup,
                                  r.repetitions,
                                  r.real_resident_records,
                                  r.timed ? 1 : 0};
    });
}

hs_status hs_bench_report_json(const hs_bench_report* report, char* buf, size_t cap,
                               size_t* needed) {
    return guard([&] {
        require(report, "report");
        BenchReport r;
        r.count = report->count;
        r.code_bits = report->code_bits;
        r.code_payload_bytes = report->code_payload_bytes;
        r.real_payload_bytes = report->real_payload_bytes;
        r.database_file_bytes = report->database_file_bytes;
        r.compression_ratio = report->compression_ratio;
        r.hamming_seconds = report->hamming_seconds;
        r.cosine_seconds = report->cosine_seconds;
        r.speedup = report->speedup;
        r.repetitions = report->repetitions;
        r.real_resident_records = report->real_resident_records;
        r.timed = report->timed != 0;
        copy_text(bench_report_json(r), buf, cap, needed);
    });
}

}  // extern "C"
