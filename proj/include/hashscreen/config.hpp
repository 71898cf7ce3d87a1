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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hashscreen/dataio.hpp"
#include "hashscreen/trainer.hpp"

namespace hashscreen {

/// Everything a training or sweep run needs. Data comes from the two TSV
/// feature files when protein_features is set, otherwise from `synthetic`.
struct RunConfig {
    TrainingConfig training;
    SynthSpec synthetic;
    std::filesystem::path protein_features;
    std::filesystem::path molecule_features;
    std::filesystem::path labels;
    std::array<double, 3> split{0.7, 0.15, 0.15};

    bool uses_synthetic() const { return protein_features.empty(); }
};

/// Sets one key; throws kInvalidInput for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// `key = value` lines; blank lines and lines starting with '#' are ignored.
/// Relative data paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::string& source_name,
                           const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical key = value rendering of a config, loadable by parse_run_config.
std::string format_run_config(const RunConfig& config);

std::vector<std::string> run_config_keys();

}  // namespace hashscreen
