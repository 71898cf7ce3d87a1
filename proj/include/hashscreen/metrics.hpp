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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hashscreen/codes.hpp"
#include "hashscreen/matrix.hpp"

namespace hashscreen {

inline constexpr double kDefaultBedrocAlpha = 80.5;

struct RankedItem {
    std::uint64_t id = 0;
    double score = 0.0;
    bool active = false;
};

/// Items ordered by descending score, ties broken by ascending id.
class Ranking {
 public:
    /// Item i gets id i. Scores must be finite.
    static Ranking from_scores(std::span<const double> scores, std::span<const std::uint8_t> active);

    static Ranking from_items(std::vector<RankedItem> items);

    const std::vector<RankedItem>& items() const noexcept { return items_; }
    std::size_t total() const noexcept { return items_.size(); }
    std::size_t actives() const noexcept { return actives_; }

    /// 1-based positions of the actives in ranking order.
    std::vector<std::size_t> active_ranks() const;

 private:
    std::vector<RankedItem> items_;
    std::size_t actives_ = 0;
};

/// Mann-Whitney AUROC; tied scores count one half.
double auroc(const Ranking& ranking);

/// Truchon-Bayly BEDROC over the integer ranks of the actives.
double bedroc(const Ranking& ranking, double alpha = kDefaultBedrocAlpha);

/// Active rate in the top ceil(N * x / 100) items over the overall active rate.
double enrichment_factor(const Ranking& ranking, double x_percent);

/// Size of the EF window for N items at x percent.
std::size_t enrichment_window(std::size_t total, double x_percent);

struct MetricReport {
    double auroc = 0.0;
    double bedroc = 0.0;
    double ef_0_5 = 0.0;
    double ef_1 = 0.0;
    double ef_5 = 0.0;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

MetricReport evaluate_ranking(const Ranking& ranking, double alpha = kDefaultBedrocAlpha);

enum class ScreenMode { kHamming, kCosine };

/// Ranks `database` against a query code. Hamming mode scores by negative
/// distance; cosine mode scores by cosine of the +-1 vectors.
MetricReport evaluate_screen(const BinaryCode& query, std::span<const BinaryCode> database,
                             std::span<const std::uint8_t> active, ScreenMode mode,
                             double alpha = kDefaultBedrocAlpha);

/// Real-valued cosine ranking of the rows of `database`.
MetricReport evaluate_screen(std::span<const double> query, const Matrix& database,
                             std::span<const std::uint8_t> active,
                             double alpha = kDefaultBedrocAlpha);

struct QueryMetrics {
    std::string query_id;
    MetricReport report;
};

/// Component-wise mean over queries.
MetricReport mean_report(std::span<const QueryMetrics> rows);

/// query_id,auroc,bedroc,ef0.5,ef1,ef5
void write_metrics_csv(const std::filesystem::path& path, std::span<const QueryMetrics> rows);

/// {"mode", "queries", "skipped", "mean": {...}} with the CSV's metric keys.
void write_metrics_json(const std::filesystem::path& path, std::span<const QueryMetrics> rows,
                        const std::string& mode, std::size_t skipped = 0);

}  // namespace hashscreen
