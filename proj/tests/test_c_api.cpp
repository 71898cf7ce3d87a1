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

#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hashscreen/hashscreen.h"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace {

const std::filesystem::path kData(HASHSCREEN_TEST_DATA);

hs_config* tiny_config() {
    hs_config* cfg = nullptr;
    EXPECT_EQ(hs_config_create(&cfg), HS_OK);
    for (auto [k, v] : std::vector<std::pair<const char*, const char*>>{
             {"synthetic.clusters", "4"},
             {"synthetic.pairs_per_cluster", "30"},
             {"split", "0.6,0.2,0.2"},
             {"epochs", "2"},
             {"code_length", "32"},
             {"hidden_dim", "16"}}) {
        EXPECT_EQ(hs_config_set(cfg, k, v), HS_OK);
    }
    return cfg;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
    EXPECT_STREQ(hs_version(), "0.1.0");
    EXPECT_STREQ(hs_status_name(HS_OK), "ok");
    EXPECT_STREQ(hs_status_name(HS_ERR_CORRUPT_DATABASE), "corrupt_database");
    EXPECT_STREQ(hs_status_name(static_cast<hs_status>(99)), "unknown");
}

TEST(CApi, ErrorsSetStatusAndMessage) {
    hs_config* cfg = nullptr;
    ASSERT_EQ(hs_config_create(&cfg), HS_OK);
    EXPECT_EQ(hs_config_set(cfg, "no_such_key", "1"), HS_ERR_INVALID_INPUT);
    EXPECT_NE(std::string(hs_last_error_message()).find("no_such_key"), std::string::npos);
    EXPECT_EQ(hs_config_set(nullptr, "lambda", "1"), HS_ERR_INVALID_INPUT);
    EXPECT_EQ(hs_config_load("/nonexistent/x.cfg", &cfg), HS_ERR_NOT_FOUND);
    hs_config_destroy(cfg);
    hs_config_destroy(nullptr);
}

TEST(CApi, ConfigFormatBufferProtocol) {
    hs_config* cfg = nullptr;
    ASSERT_EQ(hs_config_create(&cfg), HS_OK);
    ASSERT_EQ(hs_config_set(cfg, "lambda", "0.5"), HS_OK);
    size_t needed = 0;
    ASSERT_EQ(hs_config_format(cfg, nullptr, 0, &needed), HS_OK);
    ASSERT_GT(needed, 1u);
    std::vector<char> small(needed - 1);
    EXPECT_EQ(hs_config_format(cfg, small.data(), small.size(), &needed), HS_ERR_INVALID_INPUT);
    std::vector<char> buf(needed);
    ASSERT_EQ(hs_config_format(cfg, buf.data(), buf.size(), nullptr), HS_OK);
    EXPECT_EQ(std::strlen(buf.data()) + 1, needed);
    EXPECT_NE(std::string(buf.data()).find("lambda = 0.5\n"), std::string::npos);
    hs_config_destroy(cfg);
}

TEST(CApi, FeaturesAccessors) {
    hs_features* f = nullptr;
    ASSERT_EQ(hs_features_load((kData / "proteins_3.tsv").c_str(), &f), HS_OK);
    EXPECT_EQ(hs_features_count(f), 3u);
    EXPECT_EQ(hs_features_dim(f), 3u);
    EXPECT_STREQ(hs_features_id(f, 1), "P2");
    EXPECT_EQ(hs_features_row(f, 0)[1], -1.25);
    EXPECT_EQ(hs_features_id(f, 3), nullptr);
    hs_features_destroy(f);
}

TEST(CApi, TrainEncodeSearchEvaluate) {
    testing_support::TempDir dir;
    hs_config* cfg = tiny_config();
    const auto p = (dir / "p.tsv").string();
    const auto m = (dir / "m.tsv").string();
    const auto l = (dir / "l.tsv").string();
    ASSERT_EQ(hs_write_synthetic(cfg, p.c_str(), m.c_str(), l.c_str()), HS_OK) << hs_last_error_message();

    hs_train_summary s{};
    const auto ckpt = (dir / "model.ckpt").string();
    const auto csv = (dir / "curve.csv").string();
    ASSERT_EQ(hs_train(cfg, ckpt.c_str(), csv.c_str(), &s), HS_OK) << hs_last_error_message();
    EXPECT_EQ(s.epochs, 2u);
    EXPECT_EQ(s.train_pairs + s.validation_pairs + s.test_pairs, 120u);
    EXPECT_GE(s.best_epoch, 1u);

    hs_model* model = nullptr;
    ASSERT_EQ(hs_model_load(ckpt.c_str(), &model), HS_OK);
    EXPECT_EQ(hs_model_code_bits(model), 32u);
    EXPECT_EQ(hs_model_input_dim(model, HS_PROTEIN), 32u);

    hs_features* pf = nullptr;
    ASSERT_EQ(hs_features_load(p.c_str(), &pf), HS_OK);
    std::vector<double> emb(32);
    ASSERT_EQ(hs_model_embed(model, HS_PROTEIN, hs_features_row(pf, 0), 32, emb.data()), HS_OK);
    uint64_t word = 0;
    ASSERT_EQ(hs_model_hash(model, HS_PROTEIN, hs_features_row(pf, 0), 32, &word), HS_OK);
    for (std::size_t i = 0; i < 32; ++i) {
        EXPECT_EQ(((word >> i) & 1) != 0, emb[i] > 0.0);
    }
    EXPECT_EQ(hs_model_embed(model, HS_PROTEIN, hs_features_row(pf, 0), 31, emb.data()), HS_ERR_SHAPE);

    const auto qdb = (dir / "q.dhdb").string();
    const auto tdb = (dir / "t.dhdb").string();
    uint64_t count = 0;
    ASSERT_EQ(hs_database_encode(model, HS_PROTEIN, p.c_str(), qdb.c_str(), &count), HS_OK);
    EXPECT_EQ(count, 120u);
    ASSERT_EQ(hs_database_encode(model, HS_MOLECULE, m.c_str(), tdb.c_str(), &count), HS_OK);

    hs_database* db = nullptr;
    ASSERT_EQ(hs_database_open(tdb.c_str(), &db), HS_OK);
    EXPECT_EQ(hs_database_count(db), 120u);
    EXPECT_EQ(hs_database_code_bits(db), 32u);
    EXPECT_STREQ(hs_database_id(db, 0), "m0");
    uint64_t code = 0;
    ASSERT_EQ(hs_database_code(db, 5, &code), HS_OK);
    std::vector<hs_hit> hits(10);
    size_t found = 0;
    ASSERT_EQ(hs_database_search(db, &code, 1, 10, 1, hits.data(), &found), HS_OK);
    ASSERT_EQ(found, 10u);
    EXPECT_EQ(hits[0].distance, 0u);
    for (std::size_t i = 1; i < found; ++i) {
        EXPECT_TRUE(hits[i - 1].distance < hits[i].distance ||
                    (hits[i - 1].distance == hits[i].distance && hits[i - 1].index < hits[i].index));
    }
    EXPECT_EQ(hs_database_search(db, &code, 2, 10, 1, hits.data(), &found), HS_ERR_INVALID_INPUT);
    hs_database_close(db);

    hs_eval_summary hamming{};
    hs_eval_summary cosine{};
    ASSERT_EQ(hs_eval_databases(qdb.c_str(), tdb.c_str(), l.c_str(), HS_MODE_HAMMING, 80.5,
                                (dir / "e.csv").c_str(), (dir / "e.json").c_str(), &hamming),
              HS_OK)
        << hs_last_error_message();
    ASSERT_EQ(hs_eval_databases(qdb.c_str(), tdb.c_str(), l.c_str(), HS_MODE_COSINE, 80.5, nullptr,
                                nullptr, &cosine),
              HS_OK);
    EXPECT_EQ(hamming.queries, 120u);
    EXPECT_EQ(std::memcmp(&hamming.mean, &cosine.mean, sizeof(hs_metrics)), 0);
    const auto j = nlohmann::json::parse(oracle::read_file(dir / "e.json"));
    EXPECT_EQ(j["mode"], "hamming");

    hs_eval_summary real{};
    ASSERT_EQ(hs_eval_features(model, p.c_str(), m.c_str(), l.c_str(), HS_MODE_COSINE, 80.5, nullptr,
                               nullptr, &real),
              HS_OK);
    EXPECT_EQ(real.queries, 120u);

    hs_features_destroy(pf);
    hs_model_destroy(model);
    hs_config_destroy(cfg);
}

TEST(CApi, CheckpointRoundtripThroughSave) {
    testing_support::TempDir dir;
    hs_config* cfg = tiny_config();
    hs_config_set(cfg, "synthetic.pairs_per_cluster", "12");
    hs_config_set(cfg, "split", "1,0,0");
    const auto ckpt = (dir / "a.ckpt").string();
    ASSERT_EQ(hs_train(cfg, ckpt.c_str(), nullptr, nullptr), HS_OK) << hs_last_error_message();
    hs_model* model = nullptr;
    ASSERT_EQ(hs_model_load(ckpt.c_str(), &model), HS_OK);
    const auto copy = (dir / "b.ckpt").string();
    ASSERT_EQ(hs_model_save(model, copy.c_str()), HS_OK);
    EXPECT_EQ(oracle::read_file(ckpt), oracle::read_file(copy));
    hs_model_destroy(model);
    hs_config_destroy(cfg);
}

TEST(CApi, MetricsFromScores) {
    const double scores[] = {0.9, 0.8, 0.1, 0.05};
    const uint8_t active[] = {1, 0, 1, 0};
    hs_metrics m{};
    ASSERT_EQ(hs_metrics_from_scores(scores, active, 4, 80.5, &m), HS_OK);
    EXPECT_EQ(m.auroc, 0.75);
    const uint8_t none[] = {0, 0, 0, 0};
    EXPECT_EQ(hs_metrics_from_scores(scores, none, 4, 80.5, &m), HS_ERR_UNDEFINED_METRIC);
}

TEST(CApi, BuildFromCodeFileAndCorruption) {
    testing_support::TempDir dir;
    oracle::write_file(dir / "codes.tsv", "a\t101\nb\t011\n");
    uint64_t count = 0;
    const auto path = (dir / "c.dhdb").string();
    ASSERT_EQ(hs_database_build((dir / "codes.tsv").c_str(), path.c_str(), &count), HS_OK);
    EXPECT_EQ(count, 2u);
    hs_database* db = nullptr;
    ASSERT_EQ(hs_database_open(path.c_str(), &db), HS_OK);
    EXPECT_STREQ(hs_database_id(db, 1), "b");
    hs_database_close(db);

    oracle::write_file(dir / "empty.tsv", "");
    EXPECT_EQ(hs_database_build((dir / "empty.tsv").c_str(), path.c_str(), &count), HS_ERR_INVALID_INPUT);

    auto bytes = oracle::read_file(path);
    oracle::write_file(path, bytes.substr(0, bytes.size() - 3));
    EXPECT_EQ(hs_database_open(path.c_str(), &db), HS_ERR_CORRUPT_DATABASE);
    EXPECT_NE(std::string(hs_last_error_message()).find("'size'"), std::string::npos);
}

TEST(CApi, SweepCountsFailures) {
    testing_support::TempDir dir;
    hs_config* cfg = tiny_config();
    const double values[] = {0.2, -1.0};
    size_t failures = 0;
    ASSERT_EQ(hs_sweep(cfg, HS_SWEEP_LAMBDA, values, 2, (dir / "s.csv").c_str(), &failures), HS_OK);
    EXPECT_EQ(failures, 1u);
    hs_config_destroy(cfg);
}

TEST(CApi, BenchReportAndJson) {
    testing_support::TempDir dir;
    hs_bench_options o;
    hs_bench_default_options(&o);
    o.count = 5000;
    o.repetitions = 1;
    const auto work = dir.path().string();
    o.work_dir = work.c_str();
    hs_bench_report r{};
    ASSERT_EQ(hs_bench(&o, &r), HS_OK) << hs_last_error_message();
    EXPECT_EQ(r.code_payload_bytes * 32, r.real_payload_bytes);
    EXPECT_EQ(r.timed, 1);
    size_t needed = 0;
    ASSERT_EQ(hs_bench_report_json(&r, nullptr, 0, &needed), HS_OK);
    std::string buf(needed, '\0');
    ASSERT_EQ(hs_bench_report_json(&r, buf.data(), buf.size(), nullptr), HS_OK);
    const auto j = nlohmann::json::parse(buf.c_str());
    EXPECT_EQ(j["count"], 5000);
}
