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

#include "hashscreen/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

#include "hashscreen/error.hpp"

namespace hashscreen {

namespace {

std::string setting_text(SweepKind kind, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(kind == SweepKind::kLambda ? "lambda=" : "code_length=") + std::string(buf, ptr);
}

std::vector<const std::string*> resolve_labels(
    std::span<const std::string> ids, std::vector<std::string>& missing,
    const std::unordered_map<std::string, std::string>& labels) {
    std::vector<const std::string*> out(ids.size(), nullptr);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = labels.find(ids[i]);
        if (it == labels.end()) {
            missing.push_back(ids[i]);
        } else {
            out[i] = &it->second;
        }
    }
    return out;
}

void report_missing(const std::vector<std::string>& missing) {
    if (missing.empty()) {
        return;
    }
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
        list += (i ? ", " : "") + missing[i];
    }
    if (missing.size() > 10) {
        list += ", ...";
    }
    fail(ErrorType::kInvalidInput,
         std::to_string(missing.size()) + " ids have no label: " + list);
}

template <class ScreenOne>
ScreenOutcome screen(std::span<const std::string> query_ids, std::span<const std::string> target_ids,
                     const std::unordered_map<std::string, std::string>& labels, ScreenOne&& one) {
    std::vector<std::string> missing;
    const auto q_labels = resolve_labels(query_ids, missing, labels);
    const auto t_labels = resolve_labels(target_ids, missing, labels);
    report_missing(missing);

    ScreenOutcome out;
    std::vector<std::uint8_t> active(target_ids.size());
    for (std::size_t q = 0; q < query_ids.size(); ++q) {
        std::size_t n_active = 0;
        for (std::size_t t = 0; t < target_ids.size(); ++t) {
            active[t] = *t_labels[t] == *q_labels[q] ? 1 : 0;
            n_active += active[t];
        }
        if (n_active == 0 || n_active == target_ids.size()) {
            ++out.skipped;
            continue;
        }
        out.queries.push_back(QueryMetrics{query_ids[q], one(q, active)});
    }
    return out;
}

}  // namespace

ScreenOutcome screen_codes(std::span<const std::string> query_ids,
                           std::span<const BinaryCode> query_codes,
                           std::span<const std::string> target_ids,
                           std::span<const BinaryCode> target_codes,
                           const std::unordered_map<std::string, std::string>& labels,
                           ScreenMode mode, double alpha) {
    if (query_ids.size() != query_codes.size() || target_ids.size() != target_codes.size()) {
        fail(ErrorType::kShapeMismatch, "ids and codes differ in count");
    }
    return screen(query_ids, target_ids, labels, [&](std::size_t q, const std::vector<std::uint8_t>& active) {
        return evaluate_screen(query_codes[q], target_codes, active, mode, alpha);
    });
}

ScreenOutcome screen_embeddings(std::span<const std::string> query_ids, const Matrix& queries,
                                std::span<const std::string> target_ids, const Matrix& targets,
                                const std::unordered_map<std::string, std::string>& labels,
                                double alpha) {
    if (query_ids.size() != queries.rows || target_ids.size() != targets.rows) {
        fail(ErrorType::kShapeMismatch, "ids and embeddings differ in count");
    }
    if (queries.rows > 0 && targets.rows > 0 && queries.cols != targets.cols) {
        fail(ErrorType::kShapeMismatch, "query embeddings have " + std::to_string(queries.cols) +
                                            " dimensions, targets have " + std::to_string(targets.cols));
    }
    return screen(query_ids, target_ids, labels, [&](std::size_t q, const std::vector<std::uint8_t>& active) {
        return evaluate_screen(queries.row(q), targets, active, alpha);
    });
}

PairDataset load_dataset(const RunConfig& config) {
    if (config.uses_synthetic()) {
        return generate_synthetic(config.synthetic);
    }
    if (config.molecule_features.empty()) {
        fail(ErrorType::kInvalidInput, "protein_features is set but molecule_features is not");
    }
    auto data = load_pairs(config.protein_features, config.molecule_features);
    if (!config.labels.empty()) {
        attach_labels(data, load_labels(config.labels));
    }
    return data;
}

ExperimentResult run_experiment(const RunConfig& config) {
    return run_experiment(config, load_dataset(config));
}

ExperimentResult run_experiment(const RunConfig& config, const PairDataset& dataset) {
    const auto parts = split(dataset, config.split, config.training.seed);
    ExperimentResult r;
    r.train_pairs = parts.train.size();
    r.validation_pairs = parts.validation.size();
    r.test_pairs = parts.test.size();
    const PairDataset* validation = parts.validation.size() > 0 ? &parts.validation : nullptr;
    r.training = train(parts.train, validation, config.training);
    const double alpha = config.training.bedroc_alpha;
    if (validation != nullptr) {
        r.validation = evaluate_retrieval(r.training.best, parts.validation, alpha);
    }
    const PairDataset& held_out = parts.test.size() > 0 ? parts.test : parts.validation;
    if (held_out.size() > 0) {
        r.test = evaluate_retrieval(r.training.best, held_out, alpha);
    }
    return r;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, SweepKind kind, std::span<const double> values) {
    std::vector<SweepRow> rows;
    std::optional<PairDataset> dataset;
    for (double v : values) {
        SweepRow row;
        row.setting = setting_text(kind, v);
        try {
            RunConfig cfg = base;
            if (kind == SweepKind::kLambda) {
                cfg.training.lambda = v;
            } else {
                if (!(v >= 1.0) || v != std::floor(v)) {
                    fail(ErrorType::kInvalidInput, "code length must be a positive integer");
                }
                cfg.training.code_bits = static_cast<std::size_t>(v);
            }
            if (!dataset) {
                dataset = load_dataset(base);
            }
            const auto result = run_experiment(cfg, *dataset);
            row.ok = true;
            row.test = result.test;
            row.val_bedroc = result.validation.bedroc;
        } catch (const Error& e) {
            row.error = std::string(to_string(e.type())) + ": " + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open for writing: " + path.string());
    }
    out.precision(17);
    out << "setting,bedroc,ef0.5,ef1,ef5,status\n";
    for (const auto& r : rows) {
        out << r.setting << ',';
        if (r.ok) {
            out << r.test.bedroc << ',' << r.test.ef_0_5 << ',' << r.test.ef_1 << ',' << r.test.ef_5
                << ",ok\n";
        } else {
            std::string err = r.error;
            for (auto& ch : err) {
                if (ch == ',' || ch == '\n') {
                    ch = ';';
                }
            }
            out << ",,,,failed: " << err << '\n';
        }
    }
    if (!out) {
        fail(ErrorType::kIo, "failed writing " + path.string());
    }
}

}  // namespace hashscreen
