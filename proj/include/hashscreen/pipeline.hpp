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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hashscreen/config.hpp"
#include "hashscreen/dataio.hpp"
#include "hashscreen/metrics.hpp"
#include "hashscreen/trainer.hpp"

namespace hashscreen {

/// The TSV pair files (with labels when configured) or the synthetic set.
PairDataset load_dataset(const RunConfig& config);

struct ExperimentResult {
    TrainingResult training;
    /// Hashed retrieval of the selected model on the validation and test parts.
    MetricReport validation;
    MetricReport test;
    std::size_t train_pairs = 0;
    std::size_t validation_pairs = 0;
    std::size_t test_pairs = 0;
};

/// Split, train with epoch selection on validation, evaluate on test.
ExperimentResult run_experiment(const RunConfig& config);
ExperimentResult run_experiment(const RunConfig& config, const PairDataset& dataset);

struct ScreenOutcome {
    std::vector<QueryMetrics> queries;
    /// Queries whose targets are all active or all inactive.
    std::size_t skipped = 0;
};

/// Every query screens every target; targets sharing the query's label are
/// active. Ids missing from `labels` are reported together.
ScreenOutcome screen_codes(std::span<const std::string> query_ids,
                           std::span<const BinaryCode> query_codes,
                           std::span<const std::string> target_ids,
                           std::span<const BinaryCode> target_codes,
                           const std::unordered_map<std::string, std::string>& labels,
                           ScreenMode mode, double alpha = kDefaultBedrocAlpha);

/// Real-valued cosine screening of continuous embeddings.
ScreenOutcome screen_embeddings(std::span<const std::string> query_ids, const Matrix& queries,
                                std::span<const std::string> target_ids, const Matrix& targets,
                                const std::unordered_map<std::string, std::string>& labels,
                                double alpha = kDefaultBedrocAlpha);

enum class SweepKind { kLambda, kCodeLength };

struct SweepRow {
    std::string setting;
    bool ok = false;
    std::string error;
    MetricReport test;
    double val_bedroc = 0.0;
};

/// One experiment per value with every other setting (seed included) shared.
/// A failing setting is recorded and the sweep continues.
std::vector<SweepRow> run_sweep(const RunConfig& base, SweepKind kind, std::span<const double> values);

/// setting,bedroc,ef0.5,ef1,ef5,status
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

}  // namespace hashscreen
