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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hashscreen/codes.hpp"
#include "hashscreen/matrix.hpp"

namespace hashscreen {

/// Rows of a TSV feature file: an id followed by F numeric fields.
struct FeatureTable {
    std::vector<std::string> ids;
    Matrix values;
};

/// Parses a TSV feature file. Ragged rows, non-numeric or non-finite fields
/// are rejected with their line number. An empty file is a table of 0 rows.
FeatureTable load_features(const std::filesystem::path& path);

/// Writes values with enough digits to parse back to the same doubles.
void write_features(const std::filesystem::path& path, const FeatureTable& table);

/// Aligned protein/molecule feature rows: row k on both sides is pair k.
/// id<TAB>bit string per line; all codes share one length.
struct CodeTable {
    std::vector<std::string> ids;
    std::vector<BinaryCode> codes;
};

CodeTable load_code_table(const std::filesystem::path& path);

struct PairDataset {
    Matrix proteins;
    Matrix molecules;
    std::vector<std::string> protein_ids;
    std::vector<std::string> molecule_ids;
    /// Optional group labels; pairs sharing a label are mutually active.
    std::vector<std::int64_t> labels;

    std::size_t size() const noexcept { return proteins.rows; }
    bool has_labels() const noexcept { return !labels.empty(); }

    /// Rows picked by index, in the given order.
    PairDataset subset(std::span<const std::size_t> rows) const;
};

PairDataset load_pairs(const std::filesystem::path& protein_file,
                       const std::filesystem::path& molecule_file);

/// id<TAB>label lines.
std::unordered_map<std::string, std::string> load_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, std::span<const std::string> ids,
                  std::span<const std::int64_t> labels);

/// Attaches labels to a dataset by protein id; every pair must be covered.
void attach_labels(PairDataset& dataset, const std::unordered_map<std::string, std::string>& labels);

struct SynthSpec {
    std::size_t num_clusters = 8;
    std::size_t pairs_per_cluster = 64;
    std::size_t protein_dim = 32;
    std::size_t molecule_dim = 32;
    std::size_t latent_dim = 8;
    double center_scale = 1.0;
    /// Pair-level and feature-level noise standard deviation.
    double noise = 0.3;
    std::uint64_t seed = 7;

    void validate() const;
};

/// Each cluster has a latent center; each pair draws a shared latent
/// z = center + noise * e, and each modality sees A_side z + noise * e_side
/// through its own fixed random linear map. Labels are cluster indices.
PairDataset generate_synthetic(const SynthSpec& spec);

struct DatasetSplit {
    PairDataset train;
    PairDataset validation;
    PairDataset test;
};

/// Cluster-stratified (by label; one stratum when unlabeled) random split.
/// Fractions must be non-negative and sum to 1; a positive fraction that
/// produces an empty part is an error.
DatasetSplit split(const PairDataset& dataset, std::array<double, 3> fractions, std::uint64_t seed);

}  // namespace hashscreen
