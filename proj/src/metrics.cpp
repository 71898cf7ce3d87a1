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

#include "hashscreen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hashscreen/error.hpp"

namespace hashscreen {

namespace {

void require_defined(const Ranking& r) {
    if (r.actives() == 0 || r.actives() == r.total()) {
        fail(ErrorType::kUndefinedMetric, "metric needs both actives and inactives (N=" +
                                              std::to_string(r.total()) +
                                              ", actives=" + std::to_string(r.actives()) + ")");
    }
}

std::string format_metric(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

Ranking Ranking::from_scores(std::span<const double> scores, std::span<const std::uint8_t> active) {
    if (scores.size() != active.size()) {
        fail(ErrorType::kShapeMismatch, "scores and activity labels differ in length");
    }
    std::vector<RankedItem> items(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        items[i] = RankedItem{i, scores[i], active[i] != 0};
    }
    return from_items(std::move(items));
}

Ranking Ranking::from_items(std::vector<RankedItem> items) {
    Ranking r;
    for (const auto& item : items) {
        if (!std::isfinite(item.score)) {
            fail(ErrorType::kInvalidInput, "non-finite score for item " + std::to_string(item.id));
        }
        r.actives_ += item.active ? 1 : 0;
    }
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    r.items_ = std::move(items);
    return r;
}

std::vector<std::size_t> Ranking::active_ranks() const {
    std::vector<std::size_t> ranks;
    ranks.reserve(actives_);
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (items_[i].active) {
            ranks.push_back(i + 1);
        }
    }
    return ranks;
}

double auroc(const Ranking& ranking) {
    require_defined(ranking);
    // Average ascending ranks over tie groups; items() is sorted by
    // descending score, so walk it backwards.
    const auto& items = ranking.items();
    const std::size_t total = items.size();
    double active_rank_sum = 0.0;
    std::size_t pos = 0;  // number of items with strictly lower score
    std::size_t i = total;
    while (i > 0) {
        std::size_t j = i;
        while (j > 0 && items[j - 1].score == items[i - 1].score) {
            --j;
        }
        const std::size_t group = i - j;
        const double avg_rank = static_cast<double>(pos) + (static_cast<double>(group) + 1.0) / 2.0;
        for (std::size_t t = j; t < i; ++t) {
            if (items[t].active) {
                active_rank_sum += avg_rank;
            }
        }
        pos += group;
        i = j;
    }
    const double n = static_cast<double>(ranking.actives());
    const double m = static_cast<double>(total - ranking.actives());
    return (active_rank_sum - n * (n + 1.0) / 2.0) / (n * m);
}

double bedroc(const Ranking& ranking, double alpha) {
    require_defined(ranking);
    if (!(alpha > 0.0)) {
        fail(ErrorType::kInvalidInput, "BEDROC alpha must be positive");
    }
    const double big_n = static_cast<double>(ranking.total());
    const double n = static_cast<double>(ranking.actives());
    const double ra = n / big_n;

    double sum = 0.0;
    for (std::size_t r : ranking.active_ranks()) {
        sum += std::exp(-alpha * static_cast<double>(r) / big_n);
    }
    const double random_sum = ra * (1.0 - std::exp(-alpha)) / std::expm1(alpha / big_n);
    const double rie = sum / random_sum;
    const double value = rie * ra * std::sinh(alpha / 2.0) /
                             (std::cosh(alpha / 2.0) - std::cosh(alpha / 2.0 - alpha * ra)) +
                         1.0 / (1.0 - std::exp(alpha * (1.0 - ra)));
    return std::clamp(value, 0.0, 1.0);
}

std::size_t enrichment_window(std::size_t total, double x_percent) {
    if (!(x_percent > 0.0) || x_percent > 100.0) {
        fail(ErrorType::kInvalidInput, "enrichment cutoff must be in (0, 100] percent");
    }
    const double exact = static_cast<double>(total) * x_percent / 100.0;
    // Absorb representation error so that e.g. 200 * 1 / 100 stays 2.
    const double window = std::ceil(exact - 1e-9 * std::max(1.0, exact));
    return std::min(total, static_cast<std::size_t>(std::max(0.0, window)));
}

double enrichment_factor(const Ranking& ranking, double x_percent) {
    const std::size_t window = enrichment_window(ranking.total(), x_percent);
    if (window == 0) {
        fail(ErrorType::kUndefinedMetric, "enrichment window contains no items");
    }
    if (ranking.actives() == 0) {
        fail(ErrorType::kUndefinedMetric, "enrichment factor needs at least one active");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < window; ++i) {
        hits += ranking.items()[i].active ? 1 : 0;
    }
    return (static_cast<double>(hits) / static_cast<double>(window)) /
           (static_cast<double>(ranking.actives()) / static_cast<double>(ranking.total()));
}

MetricReport evaluate_ranking(const Ranking& ranking, double alpha) {
    MetricReport r;
    r.auroc = auroc(ranking);
    r.bedroc = bedroc(ranking, alpha);
    r.ef_0_5 = enrichment_factor(ranking, 0.5);
    r.ef_1 = enrichment_factor(ranking, 1.0);
    r.ef_5 = enrichment_factor(ranking, 5.0);
    return r;
}

MetricReport evaluate_screen(const BinaryCode& query, std::span<const BinaryCode> database,
                             std::span<const std::uint8_t> active, ScreenMode mode, double alpha) {
    if (database.size() != active.size()) {
        fail(ErrorType::kShapeMismatch, "activity labels do not cover the database");
    }
    std::vector<double> scores(database.size());
    const Embedding q = mode == ScreenMode::kCosine ? code_to_embedding(query) : Embedding{};
    for (std::size_t i = 0; i < database.size(); ++i) {
        if (mode == ScreenMode::kHamming) {
            scores[i] = -static_cast<double>(hamming_distance(query, database[i]));
        } else {
            scores[i] = cosine_similarity(q, code_to_embedding(database[i]));
        }
    }
    return evaluate_ranking(Ranking::from_scores(scores, active), alpha);
}

MetricReport evaluate_screen(std::span<const double> query, const Matrix& database,
                             std::span<const std::uint8_t> active, double alpha) {
    if (database.rows != active.size()) {
        fail(ErrorType::kShapeMismatch, "activity labels do not cover the database");
    }
    std::vector<double> scores(database.rows);
    for (std::size_t i = 0; i < database.rows; ++i) {
        scores[i] = cosine_similarity(query, database.row(i));
    }
    return evaluate_ranking(Ranking::from_scores(scores, active), alpha);
}

MetricReport mean_report(std::span<const QueryMetrics> rows) {
    MetricReport m;
    if (rows.empty()) {
        return m;
    }
    for (const auto& q : rows) {
        m.auroc += q.report.auroc;
        m.bedroc += q.report.bedroc;
        m.ef_0_5 += q.report.ef_0_5;
        m.ef_1 += q.report.ef_1;
        m.ef_5 += q.report.ef_5;
    }
    const double n = static_cast<double>(rows.size());
    m.auroc /= n;
    m.bedroc /= n;
    m.ef_0_5 /= n;
    m.ef_1 /= n;
    m.ef_5 /= n;
    return m;
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const QueryMetrics> rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open for writing: " + path.string());
    }
    out << "query_id,auroc,bedroc,ef0.5,ef1,ef5\n";
    for (const auto& q : rows) {
        out << q.query_id << ',' << format_metric(q.report.auroc) << ','
            << format_metric(q.report.bedroc) << ',' << format_metric(q.report.ef_0_5) << ','
            << format_metric(q.report.ef_1) << ',' << format_metric(q.report.ef_5) << '\n';
    }
    if (!out) {
        fail(ErrorType::kIo, "failed writing " + path.string());
    }
}

void write_metrics_json(const std::filesystem::path& path, std::span<const QueryMetrics> rows,
                        const std::string& mode, std::size_t skipped) {
    const auto mean = mean_report(rows);
    nlohmann::ordered_json j;
    j["mode"] = mode;
    j["queries"] = rows.size();
    j["skipped"] = skipped;
    j["mean"] = {{"auroc", mean.auroc},
                 {"bedroc", mean.bedroc},
                 {"ef0.5", mean.ef_0_5},
                 {"ef1", mean.ef_1},
                 {"ef5", mean.ef_5}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open for writing: " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        fail(ErrorType::kIo, "failed writing " + path.string());
    }
}

}  // namespace hashscreen
