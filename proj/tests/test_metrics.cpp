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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "hashscreen/error.hpp"
#include "hashscreen/metrics.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace hashscreen;

namespace {

std::vector<std::uint8_t> as_flags(const std::vector<bool>& a) {
    return std::vector<std::uint8_t>(a.begin(), a.end());
}

// Actives placed at the given 1-based ranks of an N-item ranking.
Ranking ranking_with_actives(std::size_t total, const std::vector<std::size_t>& ranks) {
    std::vector<double> scores(total);
    std::vector<std::uint8_t> active(total, 0);
    for (std::size_t i = 0; i < total; ++i) scores[i] = static_cast<double>(total - i);
    for (std::size_t r : ranks) active[r - 1] = 1;
    return Ranking::from_scores(scores, active);
}

std::vector<std::size_t> iota_ranks(std::size_t first, std::size_t count) {
    std::vector<std::size_t> r(count);
    std::iota(r.begin(), r.end(), first);
    return r;
}

BinaryCode random_code(std::mt19937_64& rng, std::size_t bits) {
    BinaryCode c(bits);
    for (std::size_t i = 0; i < bits; ++i) c.set_bit(i, (rng() & 1) != 0);
    return c;
}

}  // namespace

TEST(Ranking, OrdersByScoreThenId) {
    const std::vector<double> scores{0.5, 0.9, 0.5, 0.1};
    const std::vector<std::uint8_t> active{1, 0, 0, 1};
    const auto r = Ranking::from_scores(scores, active);
    ASSERT_EQ(r.total(), 4u);
    EXPECT_EQ(r.items()[0].id, 1u);
    EXPECT_EQ(r.items()[1].id, 0u);
    EXPECT_EQ(r.items()[2].id, 2u);
    EXPECT_EQ(r.items()[3].id, 3u);
    EXPECT_EQ(r.active_ranks(), (std::vector<std::size_t>{2, 4}));
}

TEST(Ranking, RejectsNonFiniteScoresAndLengthMismatch) {
    const std::vector<double> scores{0.5, NAN};
    const std::vector<std::uint8_t> active{1, 0};
    EXPECT_THROW(Ranking::from_scores(scores, active), Error);
    const std::vector<std::uint8_t> short_active{1};
    const std::vector<double> ok{0.5, 0.2};
    EXPECT_THROW(Ranking::from_scores(ok, short_active), Error);
}

TEST(Auroc, PerfectRankingIsOne) {
    EXPECT_EQ(auroc(ranking_with_actives(20, {1, 2, 3})), 1.0);
}

TEST(Auroc, ConstantScoreIsOneHalf) {
    const std::vector<double> scores(30, 1.25);
    std::vector<std::uint8_t> active(30, 0);
    active[3] = active[17] = active[29] = 1;
    EXPECT_EQ(auroc(Ranking::from_scores(scores, active)), 0.5);
}

TEST(Auroc, MatchesPairwiseOracleOnRandomRankings) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
        const std::size_t total = 2 + rng() % 80;
        std::vector<double> scores(total);
        std::vector<bool> active(total);
        for (std::size_t i = 0; i < total; ++i) {
            scores[i] = static_cast<double>(rng() % 12);  // frequent ties
            active[i] = (rng() % 3) == 0;
        }
        active[0] = true;
        active[1] = false;
        EXPECT_NEAR(auroc(Ranking::from_scores(scores, as_flags(active))),
                    oracle::auroc(scores, active), 1e-12);
    }
}

TEST(Auroc, ReversalMapsToComplement) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> scores(40);
        std::vector<bool> active(40);
        for (std::size_t i = 0; i < 40; ++i) {
            scores[i] = static_cast<double>(rng() % 1000);
            active[i] = i % 4 == 0;
        }
        auto negated = scores;
        for (auto& s : negated) s = -s;
        const double a = auroc(Ranking::from_scores(scores, as_flags(active)));
        EXPECT_NEAR(auroc(Ranking::from_scores(negated, as_flags(active))), 1.0 - a, 1e-12);
    }
}

TEST(Auroc, UndefinedWithoutBothClasses) {
    const std::vector<double> scores{1, 2, 3};
    const std::vector<std::uint8_t> all{1, 1, 1};
    const std::vector<std::uint8_t> none{0, 0, 0};
    for (const auto* a : {&all, &none}) {
        try {
            auroc(Ranking::from_scores(scores, *a));
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.type(), ErrorType::kUndefinedMetric);
        }
    }
}

TEST(Bedroc, PerfectAndWorstLimits) {
    const std::size_t total = 10000;
    const double best = bedroc(ranking_with_actives(total, iota_ranks(1, 10)), 80.5);
    const double worst = bedroc(ranking_with_actives(total, iota_ranks(total - 9, 10)), 80.5);
    EXPECT_GT(best, 0.99);
    EXPECT_LT(worst, 0.01);
    EXPECT_NEAR(best, oracle::bedroc(iota_ranks(1, 10), total, 80.5), 1e-12);
    EXPECT_NEAR(worst, std::max(0.0, oracle::bedroc(iota_ranks(total - 9, 10), total, 80.5)), 1e-12);
}

TEST(Bedroc, MatchesDirectFormulaOnRandomRankings) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 200; ++t) {
        const std::size_t total = 20 + rng() % 500;
        std::vector<double> scores(total);
        std::vector<bool> active(total);
        for (std::size_t i = 0; i < total; ++i) {
            scores[i] = static_cast<double>(rng() % 50);
            active[i] = (rng() % 7) == 0;
        }
        active[0] = true;
        active[1] = false;
        const double alpha = t % 2 ? 80.5 : 20.0;
        const double expected = std::clamp(
            oracle::bedroc(oracle::active_ranks(scores, active), total, alpha), 0.0, 1.0);
        EXPECT_NEAR(bedroc(Ranking::from_scores(scores, as_flags(active)), alpha), expected, 1e-12);
    }
}

TEST(Bedroc, MonotoneUnderSingleRankImprovementExhaustive) {
    const std::size_t total = 8;
    for (std::size_t a = 1; a <= total; ++a) {
        for (std::size_t b = a + 1; b <= total; ++b) {
            const double here = bedroc(ranking_with_actives(total, {a, b}));
            EXPECT_GE(here, 0.0);
            EXPECT_LE(here, 1.0);
            // Move either active one place earlier when that slot is free.
            if (a > 1) {
                EXPECT_GE(bedroc(ranking_with_actives(total, {a - 1, b})), here);
            }
            if (b - 1 > a) {
                EXPECT_GE(bedroc(ranking_with_actives(total, {a, b - 1})), here);
            }
        }
    }
}

TEST(Bedroc, RejectsNonPositiveAlpha) {
    EXPECT_THROW(bedroc(ranking_with_actives(10, {1}), 0.0), Error);
}

TEST(Enrichment, TopOnePercentExample) {
    // N=200, n=10, the 2-item window holds two actives.
    const auto r = ranking_with_actives(200, {1, 2, 50, 60, 70, 80, 90, 100, 110, 120});
    EXPECT_EQ(enrichment_window(200, 1.0), 2u);
    EXPECT_EQ(enrichment_factor(r, 1.0), 20.0);
}

TEST(Enrichment, PerfectHalfPercentExample) {
    const auto r = ranking_with_actives(1000, iota_ranks(1, 10));
    EXPECT_EQ(enrichment_window(1000, 0.5), 5u);
    EXPECT_EQ(enrichment_factor(r, 0.5), 100.0);
}

TEST(Enrichment, InterleavedActivesGiveAboutOne) {
    std::vector<std::size_t> ranks;
    for (std::size_t r = 10; r <= 1000; r += 10) ranks.push_back(r);
    const auto ranking = ranking_with_actives(1000, ranks);
    for (double x : {0.5, 1.0, 5.0}) {
        // One item of window granularity, expressed in EF units.
        const double step = (1.0 / static_cast<double>(enrichment_window(1000, x))) / (100.0 / 1000.0);
        EXPECT_NEAR(enrichment_factor(ranking, x), 1.0, step);
    }
}

TEST(Enrichment, CeilingWindowAndBounds) {
    EXPECT_EQ(enrichment_window(10, 0.5), 1u);
    EXPECT_EQ(enrichment_window(199, 1.0), 2u);
    EXPECT_EQ(enrichment_window(0, 1.0), 0u);
    EXPECT_THROW(enrichment_window(10, 0.0), Error);
    EXPECT_THROW(enrichment_window(10, 100.5), Error);
    const Ranking empty = Ranking::from_items({});
    EXPECT_THROW(enrichment_factor(empty, 1.0), Error);
    std::mt19937_64 rng(24);
    for (int t = 0; t < 100; ++t) {
        const std::size_t total = 10 + rng() % 300;
        std::vector<double> scores(total);
        std::vector<bool> active(total);
        for (std::size_t i = 0; i < total; ++i) {
            scores[i] = static_cast<double>(rng() % 100);
            active[i] = (rng() % 5) == 0;
        }
        active[0] = true;
        const auto r = Ranking::from_scores(scores, as_flags(active));
        const double n = static_cast<double>(r.actives());
        for (double x : {0.5, 1.0, 5.0}) {
            const double ef = enrichment_factor(r, x);
            EXPECT_GE(ef, 0.0);
            EXPECT_LE(ef, static_cast<double>(total) / n + 1e-12);
            EXPECT_NEAR(ef, oracle::enrichment(scores, active, enrichment_window(total, x)), 1e-12);
        }
    }
}

TEST(Metrics, InvariantUnderStrictlyMonotoneTransforms) {
    std::mt19937_64 rng(25);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> scores(300);
        std::vector<std::uint8_t> active(300);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            scores[i] = std::round(nd(rng) * 20.0) / 20.0;
            active[i] = (rng() % 9) == 0;
        }
        active[0] = 1;
        active[1] = 0;
        auto transformed = scores;
        for (auto& s : transformed) s = std::exp(3.0 * s) + 7.0;
        EXPECT_EQ(evaluate_ranking(Ranking::from_scores(scores, active)),
                  evaluate_ranking(Ranking::from_scores(transformed, active)));
    }
}

TEST(EvaluateScreen, PartnerAtDistanceZeroGivesPerfectAuroc) {
    std::mt19937_64 rng(26);
    const auto q = random_code(rng, 64);
    const std::vector<BinaryCode> db{q.complement(), q, random_code(rng, 64)};
    const std::vector<std::uint8_t> active{0, 1, 0};
    EXPECT_EQ(evaluate_screen(q, db, active, ScreenMode::kHamming).auroc, 1.0);
}

TEST(EvaluateScreen, HammingAndCosineModesAgreeExactly) {
    std::mt19937_64 rng(27);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 8 + rng() % 200;
        const auto q = random_code(rng, d);
        std::vector<BinaryCode> db;
        std::vector<std::uint8_t> active;
        for (int i = 0; i < 300; ++i) {
            db.push_back(random_code(rng, d));
            active.push_back((rng() % 10) == 0);
        }
        active[0] = 1;
        active[1] = 0;
        EXPECT_EQ(evaluate_screen(q, db, active, ScreenMode::kHamming),
                  evaluate_screen(q, db, active, ScreenMode::kCosine));
    }
}

TEST(EvaluateScreen, RandomScreenMatchesOracle) {
    std::mt19937_64 rng(28);
    const std::size_t d = 64;
    const std::size_t total = 500;
    for (int t = 0; t < 20; ++t) {
        const auto q = random_code(rng, d);
        std::vector<BinaryCode> db;
        std::vector<bool> active(total);
        std::vector<double> scores(total);
        std::vector<int> q01(d);
        for (std::size_t b = 0; b < d; ++b) q01[b] = q.bit(b) ? 1 : 0;
        for (std::size_t i = 0; i < total; ++i) {
            db.push_back(random_code(rng, d));
            std::vector<int> c01(d);
            for (std::size_t b = 0; b < d; ++b) c01[b] = db.back().bit(b) ? 1 : 0;
            scores[i] = -static_cast<double>(oracle::hamming(q01, c01));
            active[i] = (rng() % 20) == 0;
        }
        active[0] = true;
        const auto got = evaluate_screen(q, db, as_flags(active), ScreenMode::kHamming);
        EXPECT_NEAR(got.auroc, oracle::auroc(scores, active), 1e-12);
        EXPECT_NEAR(got.bedroc,
                    std::clamp(oracle::bedroc(oracle::active_ranks(scores, active), total, 80.5), 0.0,
                               1.0),
                    1e-12);
        EXPECT_NEAR(got.ef_0_5, oracle::enrichment(scores, active, 3), 1e-12);
        EXPECT_NEAR(got.ef_1, oracle::enrichment(scores, active, 5), 1e-12);
        EXPECT_NEAR(got.ef_5, oracle::enrichment(scores, active, 25), 1e-12);
    }
}

TEST(EvaluateScreen, RealValuedCosine) {
    Matrix db(3, 2);
    db(0, 0) = 1.0;
    db(1, 1) = 1.0;
    db(2, 0) = -1.0;
    const std::vector<double> q{0.0, 2.0};
    const std::vector<std::uint8_t> active{0, 1, 0};
    EXPECT_EQ(evaluate_screen(q, db, active).auroc, 1.0);
    const std::vector<std::uint8_t> short_active{0, 1};
    EXPECT_THROW(evaluate_screen(q, db, short_active), Error);
}

TEST(MetricsOutput, CsvAndJsonSummaries) {
    testing_support::TempDir dir;
    std::vector<QueryMetrics> rows{{"a", {1.0, 0.5, 2.0, 3.0, 4.0}}, {"b", {0.0, 0.5, 0.0, 1.0, 2.0}}};
    write_metrics_csv(dir / "m.csv", rows);
    EXPECT_EQ(oracle::read_file(dir / "m.csv"),
              "query_id,auroc,bedroc,ef0.5,ef1,ef5\na,1,0.5,2,3,4\nb,0,0.5,0,1,2\n");
    write_metrics_json(dir / "m.json", rows, "hamming", 3);
    const auto j = nlohmann::json::parse(oracle::read_file(dir / "m.json"));
    EXPECT_EQ(j["mode"], "hamming");
    EXPECT_EQ(j["queries"], 2);
    EXPECT_EQ(j["skipped"], 3);
    EXPECT_EQ(j["mean"]["auroc"], 0.5);
    EXPECT_EQ(j["mean"]["ef5"], 3.0);
}
