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

// hashscreen command line: train, encode, build, search, eval, bench, sweep, synth.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hashscreen/hashscreen.h"

namespace {

enum Exit { kOk = 0, kInput = 2, kData = 3, kRuntime = 4, kIo = 5 };

struct Failure {
    hs_status status;
    std::string message;
};

const char* category(hs_status s) {
    switch (s) {
        case HS_ERR_INVALID_INPUT:
        case HS_ERR_PARSE:
        case HS_ERR_NOT_FOUND: return "input";
        case HS_ERR_SHAPE: return "shape";
        case HS_ERR_DEGENERATE_INPUT:
        case HS_ERR_UNDEFINED_METRIC:
        case HS_ERR_CORRUPT_DATABASE: return "data";
        case HS_ERR_DIVERGED: return "divergence";
        case HS_ERR_IO: return "io";
        default: return "internal";
    }
}

int exit_code(hs_status s) {
    switch (s) {
        case HS_OK: return kOk;
        case HS_ERR_INVALID_INPUT:
        case HS_ERR_PARSE:
        case HS_ERR_NOT_FOUND: return kInput;
        case HS_ERR_SHAPE:
        case HS_ERR_DEGENERATE_INPUT:
        case HS_ERR_UNDEFINED_METRIC:
        case HS_ERR_CORRUPT_DATABASE: return kData;
        case HS_ERR_IO: return kIo;
        default: return kRuntime;
    }
}

void check(hs_status s) {
    if (s != HS_OK) {
        throw Failure{s, hs_last_error_message()};
    }
}

[[noreturn]] void input_error(const std::string& msg) { throw Failure{HS_ERR_INVALID_INPUT, msg}; }

std::string one_line(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    return s;
}

template <class T, void (*Destroy)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Destroy(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Config = Handle<hs_config, hs_config_destroy>;
using Model = Handle<hs_model, hs_model_destroy>;
using Database = Handle<hs_database, hs_database_close>;
using Features = Handle<hs_features, hs_features_destroy>;

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Flags shared by the commands that train.
struct TrainFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> data_seed;
    std::optional<double> lambda;
    std::optional<double> tau;
    std::optional<std::size_t> code_bits;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> threads;
    std::string proteins;
    std::string molecules;
    std::string labels;
    std::vector<std::string> settings;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config, "key = value run configuration file")
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "training seed (initialization, shuffling, split)");
        cmd->add_option("--data-seed", data_seed, "synthetic dataset seed");
        cmd->add_option("--lambda", lambda, "hash loss weight");
        cmd->add_option("--tau", tau, "contrastive temperature");
        cmd->add_option("--code-bits", code_bits, "code length in bits");
        cmd->add_option("--batch-size", batch_size, "pairs per batch");
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--threads", threads, "encoder threads");
        auto* p = cmd->add_option("--proteins", proteins, "protein feature TSV");
        auto* m = cmd->add_option("--molecules", molecules, "molecule feature TSV");
        p->needs(m);
        m->needs(p);
        cmd->add_option("--labels", labels, "id<TAB>label file for the training pairs");
        cmd->add_option("--set", settings, "extra key=value setting (repeatable)");
    }

    void apply(Config& cfg) const {
        if (!config.empty()) {
            check(hs_config_load(config.c_str(), cfg.out()));
        } else {
            check(hs_config_create(cfg.out()));
        }
        auto set = [&](const char* key, const std::string& value) {
            check(hs_config_set(cfg.get(), key, value.c_str()));
        };
        for (const auto& kv : settings) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                input_error("--set expects key=value, got '" + kv + "'");
            }
            set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
        }
        if (seed) set("seed", std::to_string(*seed));
        if (data_seed) set("synthetic.seed", std::to_string(*data_seed));
        if (lambda) set("lambda", format_double(*lambda));
        if (tau) set("tau", format_double(*tau));
        if (code_bits) set("code_length", std::to_string(*code_bits));
        if (batch_size) set("batch_size", std::to_string(*batch_size));
        if (epochs) set("epochs", std::to_string(*epochs));
        if (threads) set("threads", std::to_string(*threads));
        if (!proteins.empty()) set("protein_features", proteins);
        if (!molecules.empty()) set("molecule_features", molecules);
        if (!labels.empty()) set("labels", labels);
    }
};

void log_config(const Config& cfg) {
    std::size_t needed = 0;
    check(hs_config_format(cfg.get(), nullptr, 0, &needed));
    std::string text(needed, '\0');
    check(hs_config_format(cfg.get(), text.data(), text.size(), &needed));
    text.resize(needed - 1);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::cerr << "config: " << line << '\n';
    }
}

void print_metrics(const char* prefix, const hs_metrics& m) {
    std::printf("%s.auroc=%.6f\n%s.bedroc=%.6f\n%s.ef0.5=%.6f\n%s.ef1=%.6f\n%s.ef5=%.6f\n", prefix,
                m.auroc, prefix, m.bedroc, prefix, m.ef_0_5, prefix, m.ef_1, prefix, m.ef_5);
}

hs_modality parse_modality(const std::string& s) { return s == "protein" ? HS_PROTEIN : HS_MOLECULE; }
hs_mode parse_mode(const std::string& s) { return s == "hamming" ? HS_MODE_HAMMING : HS_MODE_COSINE; }

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size()) {
            input_error(std::string(flag) + ": not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        input_error(std::string(flag) + " needs at least one value");
    }
    return out;
}

std::vector<std::uint64_t> parse_code(const std::string& bits) {
    if (bits.empty()) {
        input_error("--code is empty");
    }
    std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            words[i / 64] |= std::uint64_t{1} << (i % 64);
        } else if (bits[i] != '0') {
            input_error("--code must contain only 0 and 1");
        }
    }
    return words;
}

struct SearchQuery {
    std::string id;
    std::vector<std::uint64_t> words;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hash-code protein to molecule screening: train encoders, build code databases, "
                 "search and evaluate.\nEnvironment: HASHSCREEN_THREADS caps scan and encoding "
                 "threads."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hs_version()));

    // train
    TrainFlags train_flags;
    std::string train_out;
    std::string train_curve;
    auto* train = app.add_subcommand("train", "train both encoders and save the selected checkpoint");
    train_flags.add_to(train);
    train->add_option("--out", train_out, "checkpoint path")->required();
    train->add_option("--curve", train_curve, "per-epoch CSV (default: <out>.csv)");

    // encode
    std::string enc_ckpt, enc_modality = "molecule", enc_input, enc_out;
    auto* encode = app.add_subcommand("encode", "hash a feature TSV into a code database");
    encode->add_option("--checkpoint", enc_ckpt, "trained checkpoint")->required();
    encode->add_option("--modality", enc_modality, "protein or molecule")
        ->check(CLI::IsMember({"protein", "molecule"}));
    encode->add_option("--input", enc_input, "feature TSV")->required();
    encode->add_option("--out", enc_out, "database path")->required();

    // build
    std::string build_codes, build_out;
    auto* build = app.add_subcommand("build", "build a database from an id<TAB>bits file");
    build->add_option("--codes", build_codes, "id<TAB>bits file")->required();
    build->add_option("--out", build_out, "database path")->required();

    // search
    std::string s_db, s_code, s_query_db, s_queries, s_ckpt, s_out;
    std::size_t s_k = 10;
    std::size_t s_threads = 0;
    auto* search = app.add_subcommand("search", "exact top-k Hamming search");
    search->add_option("--db", s_db, "database to search")->required();
    auto* o_code = search->add_option("--code", s_code, "one query as a bit string");
    auto* o_qdb = search->add_option("--query-db", s_query_db, "database of query codes");
    auto* o_queries = search->add_option("--queries", s_queries, "protein feature TSV of queries");
    auto* o_ckpt = search->add_option("--checkpoint", s_ckpt, "checkpoint used to hash --queries");
    o_queries->needs(o_ckpt);
    o_ckpt->needs(o_queries);
    o_code->excludes(o_qdb)->excludes(o_queries);
    o_qdb->excludes(o_queries);
    search->add_option("--k", s_k, "results per query")->check(CLI::PositiveNumber);
    search->add_option("--threads", s_threads, "scan threads (0: default)");
    search->add_option("--out", s_out, "write the table here instead of standard output");

    // eval
    std::string e_qdb, e_tdb, e_ckpt, e_queries, e_targets, e_labels, e_mode = "hamming", e_out;
    double e_alpha = 80.5;
    auto* eval = app.add_subcommand("eval", "per-query AUROC, BEDROC and EF with a mean summary");
    auto* e1 = eval->add_option("--queries-db", e_qdb, "database of query codes");
    auto* e2 = eval->add_option("--targets-db", e_tdb, "database of target codes");
    auto* e3 = eval->add_option("--checkpoint", e_ckpt, "checkpoint for feature inputs");
    auto* e4 = eval->add_option("--queries", e_queries, "protein feature TSV");
    auto* e5 = eval->add_option("--targets", e_targets, "molecule feature TSV");
    e1->needs(e2);
    e2->needs(e1);
    e3->needs(e4)->needs(e5);
    e4->needs(e3);
    e5->needs(e3);
    e1->excludes(e3);
    eval->add_option("--labels", e_labels, "id<TAB>label for queries and targets")->required();
    eval->add_option("--mode", e_mode, "hamming or cosine")
        ->check(CLI::IsMember({"hamming", "cosine"}));
    eval->add_option("--alpha", e_alpha, "BEDROC alpha");
    eval->add_option("--out", e_out, "output prefix: writes <out>.csv and <out>.json")->required();

    // bench
    hs_bench_options b_opts;
    hs_bench_default_options(&b_opts);
    std::string b_work, b_out;
    auto* benchcmd = app.add_subcommand("bench", "memory sizes and scan timing, Hamming vs cosine");
    benchcmd->add_option("--count", b_opts.count, "database records");
    benchcmd->add_option("--code-bits", b_opts.code_bits, "code length");
    benchcmd->add_option("--k", b_opts.k, "top-k");
    benchcmd->add_option("--repetitions", b_opts.repetitions, "timed scans per mode");
    benchcmd->add_option("--seed", b_opts.seed, "random database seed");
    benchcmd->add_option("--threads", b_opts.threads, "scan threads (0: default)");
    benchcmd->add_option("--memory-budget", b_opts.real_memory_budget,
                         "bytes of real-valued vectors kept resident");
    benchcmd->add_option("--work-dir", b_work, "directory for the temporary database");
    benchcmd->add_option("--out", b_out, "JSON report path (default: standard output)");

    // sweep
    TrainFlags sweep_flags;
    std::string sw_lambdas, sw_lengths, sw_out;
    auto* sweep = app.add_subcommand("sweep", "train and evaluate once per lambda or code length");
    sweep_flags.add_to(sweep);
    auto* sl = sweep->add_option("--lambdas", sw_lambdas, "comma-separated lambda values");
    auto* sc = sweep->add_option("--code-lengths", sw_lengths, "comma-separated code lengths");
    sl->excludes(sc);
    sweep->add_option("--out", sw_out, "comparison CSV")->required();

    // synth
    TrainFlags synth_flags;
    std::string sy_p, sy_m, sy_l;
    auto* synth = app.add_subcommand("synth", "write the synthetic clustered dataset");
    synth_flags.add_to(synth);
    synth->add_option("--protein-out", sy_p, "protein feature TSV")->required();
    synth->add_option("--molecule-out", sy_m, "molecule feature TSV")->required();
    synth->add_option("--labels-out", sy_l, "id<TAB>label file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: category=input message=" << one_line(e.what()) << '\n';
        return kInput;
    }

    try {
        if (*train) {
            Config cfg;
            train_flags.apply(cfg);
            log_config(cfg);
            const std::string curve = train_curve.empty() ? train_out + ".csv" : train_curve;
            hs_train_summary s{};
            check(hs_train(cfg.get(), train_out.c_str(), curve.c_str(), &s));
            std::printf("epochs=%zu\nbest_epoch=%zu\nsteps=%zu\ntrain_pairs=%zu\n"
                        "validation_pairs=%zu\ntest_pairs=%zu\n",
                        s.epochs, s.best_epoch, s.total_steps, s.train_pairs, s.validation_pairs,
                        s.test_pairs);
            if (s.validation_pairs > 0) {
                print_metrics("validation", s.validation);
            }
            if (s.test_pairs > 0) {
                print_metrics("test", s.test);
            }
        } else if (*encode) {
            Model model;
            check(hs_model_load(enc_ckpt.c_str(), model.out()));
            std::uint64_t count = 0;
            check(hs_database_encode(model.get(), parse_modality(enc_modality), enc_input.c_str(),
                                     enc_out.c_str(), &count));
            std::printf("records=%llu\ncode_bits=%zu\n", static_cast<unsigned long long>(count),
                        hs_model_code_bits(model.get()));
        } else if (*build) {
            std::uint64_t count = 0;
            check(hs_database_build(build_codes.c_str(), build_out.c_str(), &count));
            std::printf("records=%llu\n", static_cast<unsigned long long>(count));
        } else if (*search) {
            if (s_code.empty() && s_query_db.empty() && s_queries.empty()) {
                input_error("search needs one of --code, --query-db or --queries");
            }
            Database db;
            check(hs_database_open(s_db.c_str(), db.out()));
            std::vector<SearchQuery> queries;
            if (!s_code.empty()) {
                if (s_code.size() != hs_database_code_bits(db.get())) {
                    throw Failure{HS_ERR_SHAPE, "--code has " + std::to_string(s_code.size()) +
                                                    " bits, the database stores " +
                                                    std::to_string(hs_database_code_bits(db.get()))};
                }
                queries.push_back({"code", parse_code(s_code)});
            } else if (!s_query_db.empty()) {
                Database qdb;
                check(hs_database_open(s_query_db.c_str(), qdb.out()));
                const std::size_t qwords = (hs_database_code_bits(qdb.get()) + 63) / 64;
                for (std::uint64_t i = 0; i < hs_database_count(qdb.get()); ++i) {
                    SearchQuery q;
                    const char* id = hs_database_id(qdb.get(), i);
                    q.id = id ? id : std::to_string(i);
                    q.words.resize(qwords);
                    check(hs_database_code(qdb.get(), i, q.words.data()));
                    queries.push_back(std::move(q));
                }
            } else {
                Model model;
                check(hs_model_load(s_ckpt.c_str(), model.out()));
                Features f;
                check(hs_features_load(s_queries.c_str(), f.out()));
                const std::size_t bits = hs_model_code_bits(model.get());
                for (std::size_t i = 0; i < hs_features_count(f.get()); ++i) {
                    SearchQuery q{hs_features_id(f.get(), i),
                                  std::vector<std::uint64_t>((bits + 63) / 64)};
                    check(hs_model_hash(model.get(), HS_PROTEIN, hs_features_row(f.get(), i),
                                        hs_features_dim(f.get()), q.words.data()));
                    queries.push_back(std::move(q));
                }
            }
            std::ofstream file;
            if (!s_out.empty()) {
                file.open(s_out, std::ios::trunc);
                if (!file) {
                    throw Failure{HS_ERR_IO, "cannot open for writing: " + s_out};
                }
            }
            std::ostream& out = s_out.empty() ? std::cout : file;
            out << "query\trank\tindex\tid\tdistance\n";
            std::vector<hs_hit> hits(s_k);
            for (const auto& q : queries) {
                std::size_t found = 0;
                check(hs_database_search(db.get(), q.words.data(), q.words.size(), s_k, s_threads,
                                         hits.data(), &found));
                for (std::size_t r = 0; r < found; ++r) {
                    const char* id = hs_database_id(db.get(), hits[r].index);
                    out << q.id << '\t' << r + 1 << '\t' << hits[r].index << '\t'
                        << (id ? id : "") << '\t' << hits[r].distance << '\n';
                }
            }
            if (!out) {
                throw Failure{HS_ERR_IO, "failed writing search results"};
            }
        } else if (*eval) {
            if (e_qdb.empty() && e_ckpt.empty()) {
                input_error("eval needs --queries-db/--targets-db or --checkpoint/--queries/--targets");
            }
            const std::string csv = e_out + ".csv";
            const std::string json = e_out + ".json";
            hs_eval_summary s{};
            if (!e_qdb.empty()) {
                check(hs_eval_databases(e_qdb.c_str(), e_tdb.c_str(), e_labels.c_str(),
                                        parse_mode(e_mode), e_alpha, csv.c_str(), json.c_str(), &s));
            } else {
                Model model;
                check(hs_model_load(e_ckpt.c_str(), model.out()));
                check(hs_eval_features(model.get(), e_queries.c_str(), e_targets.c_str(),
                                       e_labels.c_str(), parse_mode(e_mode), e_alpha, csv.c_str(),
                                       json.c_str(), &s));
            }
            std::printf("queries=%zu\nskipped=%zu\n", s.queries, s.skipped);
            print_metrics("mean", s.mean);
        } else if (*benchcmd) {
            if (!b_work.empty()) {
                b_opts.work_dir = b_work.c_str();
            }
            hs_bench_report r{};
            check(hs_bench(&b_opts, &r));
            std::size_t needed = 0;
            check(hs_bench_report_json(&r, nullptr, 0, &needed));
            std::string text(needed, '\0');
            check(hs_bench_report_json(&r, text.data(), text.size(), &needed));
            text.resize(needed - 1);
            if (b_out.empty()) {
                std::cout << text << '\n';
            } else {
                std::ofstream f(b_out, std::ios::trunc);
                f << text << '\n';
                if (!f) {
                    throw Failure{HS_ERR_IO, "failed writing " + b_out};
                }
            }
        } else if (*sweep) {
            if (sw_lambdas.empty() && sw_lengths.empty()) {
                input_error("sweep needs --lambdas or --code-lengths");
            }
            Config cfg;
            sweep_flags.apply(cfg);
            log_config(cfg);
            const bool by_lambda = !sw_lambdas.empty();
            const auto values = by_lambda ? parse_list(sw_lambdas, "--lambdas")
                                          : parse_list(sw_lengths, "--code-lengths");
            std::size_t failures = 0;
            check(hs_sweep(cfg.get(), by_lambda ? HS_SWEEP_LAMBDA : HS_SWEEP_CODE_LENGTH,
                           values.data(), values.size(), sw_out.c_str(), &failures));
            std::printf("settings=%zu\nfailed=%zu\n", values.size(), failures);
        } else if (*synth) {
            Config cfg;
            synth_flags.apply(cfg);
            check(hs_write_synthetic(cfg.get(), sy_p.c_str(), sy_m.c_str(), sy_l.c_str()));
        }
    } catch (const Failure& f) {
        std::cerr << "error: category=" << category(f.status) << " message=" << one_line(f.message)
                  << '\n';
        return exit_code(f.status);
    }
    return kOk;
}
