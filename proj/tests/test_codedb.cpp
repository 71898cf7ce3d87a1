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
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hashscreen/codedb.hpp"
#include "hashscreen/error.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace hashscreen;

namespace {

BinaryCode random_code(std::mt19937_64& rng, std::size_t bits) {
    BinaryCode c(bits);
    for (std::size_t i = 0; i < bits; ++i) c.set_bit(i, (rng() & 1) != 0);
    return c;
}

std::vector<int> unpacked01(const BinaryCode& c) {
    std::vector<int> v(c.n_bits());
    for (std::size_t i = 0; i < c.n_bits(); ++i) v[i] = c.bit(i) ? 1 : 0;
    return v;
}

std::vector<BinaryCode> golden_codes() {
    BinaryCode a(70);
    a.set_bit(0, true);
    a.set_bit(2, true);
    a.set_bit(69, true);
    const BinaryCode b(70);
    return {a, b, b.complement()};
}

// Expects `fn` to throw a corrupt-database error that names `check`.
template <typename Fn>
void expect_corrupt(Fn fn, const std::string& check) {
    try {
        fn();
        FAIL() << "expected corrupt-database error for check " << check;
    } catch (const Error& e) {
        EXPECT_EQ(e.type(), ErrorType::kCorruptDatabase);
        EXPECT_NE(std::string(e.what()).find("'" + check + "'"), std::string::npos) << e.what();
    }
}

void expect_same_hits(const SearchResult& got,
                      const std::vector<std::pair<std::size_t, std::uint64_t>>& want) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].distance, want[i].first);
        EXPECT_EQ(got[i].index, want[i].second);
    }
}

}  // namespace

TEST(CodeDatabase, EmptyDatabaseIsHeaderOnly) {
    testing_support::TempDir dir;
    const auto db = build_database(dir / "e.dhdb", 128, {});
    EXPECT_EQ(db.count(), 0u);
    EXPECT_EQ(std::filesystem::file_size(dir / "e.dhdb"), kDatabaseHeaderBytes);
    EXPECT_TRUE(topk_hamming(db, BinaryCode(128), 5).empty());
}

TEST(CodeDatabase, GoldenThreeCodeFixture) {
    testing_support::TempDir dir;
    build_database(dir / "g.dhdb", 70, golden_codes());
    const auto golden = oracle::read_file(std::filesystem::path(HASHSCREEN_TEST_DATA) / "golden_3x70.dhdb");
    ASSERT_EQ(golden.size(), 68u);
    EXPECT_EQ(oracle::read_file(dir / "g.dhdb"), golden);

    const auto db = CodeDatabase::open(std::filesystem::path(HASHSCREEN_TEST_DATA) / "golden_3x70.dhdb");
    EXPECT_EQ(db.code_bits(), 70u);
    EXPECT_EQ(db.count(), 3u);
    EXPECT_EQ(db.codes(), golden_codes());
}

TEST(CodeDatabase, HeaderFieldsAreLittleEndian) {
    testing_support::TempDir dir;
    build_database(dir / "h.dhdb", 70, golden_codes());
    const auto bytes = oracle::read_file(dir / "h.dhdb");
    const std::string expected_header("DHDB\x01\x00\x00\x00\x46\x00\x00\x00\x03\x00\x00\x00\x00\x00\x00\x00",
                                      20);
    EXPECT_EQ(bytes.substr(0, 20), expected_header);
    // First record: bits 0 and 2 in word 0, bit 69 is bit 5 of word 1.
    EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 0x05);
    EXPECT_EQ(static_cast<unsigned char>(bytes[28]), 0x20);
}

TEST(CodeDatabase, RoundtripsManyRandomCodes) {
    testing_support::TempDir dir;
    std::mt19937_64 rng(31);
    std::vector<BinaryCode> codes;
    for (int i = 0; i < 100000; ++i) codes.push_back(random_code(rng, 100));
    const auto db = build_database(dir / "r.dhdb", 100, codes);
    ASSERT_EQ(db.count(), codes.size());
    EXPECT_EQ(db.file_bytes(), kDatabaseHeaderBytes + codes.size() * 16);
    for (int t = 0; t < 1000; ++t) {
        const std::uint64_t i = rng() % codes.size();
        EXPECT_EQ(db.code(i), codes[i]);
    }
    EXPECT_EQ(db.codes(), codes);
}

TEST(CodeDatabase, IdSidecar) {
    testing_support::TempDir dir;
    const std::vector<std::string> ids{"mol-a", "mol-b", "mol-c"};
    const auto db = build_database(dir / "i.dhdb", 70, golden_codes(), ids);
    EXPECT_EQ(db.load_ids(), ids);
    EXPECT_EQ(oracle::read_file(id_sidecar_path(dir / "i.dhdb")), "mol-a\nmol-b\nmol-c\n");
    const std::vector<std::string> short_ids{"x"};
    EXPECT_THROW(build_database(dir / "j.dhdb", 70, golden_codes(), short_ids), Error);
}

TEST(CodeDatabase, WriterRejectsMixedLengths) {
    testing_support::TempDir dir;
    DatabaseWriter w(dir / "m.dhdb", 64);
    w.append(BinaryCode(64));
    EXPECT_THROW(w.append(BinaryCode(65)), Error);
}

TEST(CodeDatabase, UnfinishedWriterLeavesValidFile) {
    testing_support::TempDir dir;
    {
        DatabaseWriter w(dir / "u.dhdb", 64);
        w.append(BinaryCode(64));
        w.append(BinaryCode(64).complement());
    }
    EXPECT_EQ(CodeDatabase::open(dir / "u.dhdb").count(), 2u);
}

TEST(CodeDatabase, CorruptFilesNameTheFailedCheck) {
    testing_support::TempDir dir;
    build_database(dir / "ok.dhdb", 70, golden_codes());
    const auto good = oracle::read_file(dir / "ok.dhdb");
    const auto p = dir / "bad.dhdb";
    auto open_bad = [&] { CodeDatabase::open(p); };

    oracle::write_file(p, good.substr(0, good.size() - 1));
    expect_corrupt(open_bad, "size");
    oracle::write_file(p, good + std::string(8, '\0'));
    expect_corrupt(open_bad, "size");
    oracle::write_file(p, good.substr(0, 10));
    expect_corrupt(open_bad, "size");

    auto mutated = [&](std::size_t offset, char value) {
        auto b = good;
        b[offset] = value;
        oracle::write_file(p, b);
    };
    mutated(0, 'X');
    expect_corrupt(open_bad, "magic");
    mutated(4, 2);
    expect_corrupt(open_bad, "version");
    mutated(6, 1);
    expect_corrupt(open_bad, "reserved");
    {
        auto b = good;
        b[8] = b[9] = b[10] = b[11] = 0;
        oracle::write_file(p, b);
        expect_corrupt(open_bad, "code_bits");
    }
    mutated(12, 4);
    expect_corrupt(open_bad, "size");

    mutated(28, static_cast<char>(0x60));  // bit 6 of word 1 lies past bit 69
    const auto db = CodeDatabase::open(p);
    expect_corrupt([&] { db.code(0); }, "padding");

    try {
        CodeDatabase::open(dir / "missing.dhdb");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.type(), ErrorType::kNotFound);
    }
}

TEST(TopkHamming, QueryInDatabaseIsFoundAtDistanceZero) {
    testing_support::TempDir dir;
    std::mt19937_64 rng(32);
    std::vector<BinaryCode> codes;
    for (int i = 0; i < 500; ++i) codes.push_back(random_code(rng, 128));
    const auto db = build_database(dir / "q.dhdb", 128, codes);
    const auto hits = topk_hamming(db, codes[321], 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0], (SearchHit{321, 0}));
}

TEST(TopkHamming, MatchesNaiveOracleAcrossPartitions) {
    testing_support::TempDir dir;
    std::mt19937_64 rng(33);
    for (int t = 0; t < 50; ++t) {
        // Short codes force many distance ties, which exercises the tie order.
        const std::size_t bits = t % 2 ? 16 : 128;
        std::vector<BinaryCode> codes;
        std::vector<std::vector<int>> naive;
        for (int i = 0; i < 10000; ++i) {
            codes.push_back(random_code(rng, bits));
            naive.push_back(unpacked01(codes.back()));
        }
        const auto db = build_database(dir / "t.dhdb", bits, codes);
        const auto q = random_code(rng, bits);
        const std::size_t k = std::vector<std::size_t>{1, 10, 10000}[t % 3];
        const auto want = oracle::topk(naive, unpacked01(q), k);
        for (std::size_t parts : {1, 2, 7, 16}) {
            expect_same_hits(topk_hamming(db, q, k, {parts, parts}), want);
        }
    }
}

TEST(TopkHamming, KLargerThanCountReturnsFullRanking) {
    testing_support::TempDir dir;
    const auto db = build_database(dir / "k.dhdb", 70, golden_codes());
    const auto hits = topk_hamming(db, golden_codes()[1], 10);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0], (SearchHit{1, 0}));
    EXPECT_EQ(hits[1], (SearchHit{0, 3}));
    EXPECT_EQ(hits[2], (SearchHit{2, 70}));
}

TEST(TopkHamming, RejectsBadQueries) {
    testing_support::TempDir dir;
    const auto db = build_database(dir / "b.dhdb", 70, golden_codes());
    EXPECT_THROW(topk_hamming(db, BinaryCode(64), 1), Error);
    EXPECT_THROW(topk_hamming(db, BinaryCode(70), 0), Error);
}

TEST(TopkCosine, MatchesNaiveOracle) {
    std::mt19937_64 rng(34);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 10; ++t) {
        const std::size_t dim = 24;
        RealVectorStore store(dim);
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < 2000; ++i) {
            std::vector<double> v(dim);
            for (auto& x : v) x = nd(rng);
            store.add(std::span<const double>(v));
            rows.push_back(v);
        }
        std::vector<double> q(dim);
        for (auto& x : q) x = nd(rng);
        const std::size_t k = std::vector<std::size_t>{1, 10, 2000}[t % 3];
        const auto got = topk_cosine(store, q, k, {1, 1});
        std::vector<std::pair<double, std::uint64_t>> all;
        for (std::uint64_t i = 0; i < rows.size(); ++i) all.emplace_back(-oracle::cosine(q, rows[i]), i);
        std::sort(all.begin(), all.end());
        ASSERT_EQ(got.size(), k);
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_NEAR(got[i].score, -all[i].first, 1e-5);
        }
        EXPECT_EQ(got[0].index, all[0].second);
        for (std::size_t parts : {2, 7, 16}) {
            EXPECT_EQ(topk_cosine(store, q, k, {parts, parts}), got);
        }
    }
}

TEST(TopkCosine, TiesBreakByIndexAndOffsetApplies) {
    RealVectorStore store(2);
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.0, 1.0};
    store.add(std::span<const double>(b));
    store.add(std::span<const double>(a));
    store.add(std::span<const double>(a));
    const auto hits = topk_cosine(store, a, 3, {}, 100);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].index, 101u);
    EXPECT_EQ(hits[1].index, 102u);
    EXPECT_EQ(hits[2].index, 100u);
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(topk_cosine(store, zero, 1), Error);
}

TEST(TopkCosine, HammingOrderEqualsCosineOnSignVectors) {
    testing_support::TempDir dir;
    std::mt19937_64 rng(35);
    const std::size_t bits = 64;
    std::vector<BinaryCode> codes;
    RealVectorStore store(bits);
    for (int i = 0; i < 3000; ++i) {
        codes.push_back(random_code(rng, bits));
        store.add(std::span<const double>(code_to_embedding(codes.back())));
    }
    const auto db = build_database(dir / "s.dhdb", bits, codes);
    for (int t = 0; t < 10; ++t) {
        const auto q = random_code(rng, bits);
        const auto h = topk_hamming(db, q, 200);
        const auto c = topk_cosine(store, code_to_embedding(q), 200);
        ASSERT_EQ(h.size(), c.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            EXPECT_EQ(h[i].index, c[i].index);
        }
    }
}

TEST(MergeTopk, KeepsBestByScoreThenIndex) {
    std::vector<ScoredHit> hits{{5, 0.5}, {1, 0.9}, {3, 0.5}, {7, 0.1}};
    const auto top = merge_topk(hits, 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].index, 1u);
    EXPECT_EQ(top[1].index, 3u);
    EXPECT_EQ(top[2].index, 5u);
}

TEST(Bench, PayloadSizesAreExactlyThirtyTwoFold) {
    EXPECT_EQ(code_payload_bytes(1'000'000, 128), 16'000'000u);
    EXPECT_EQ(real_payload_bytes(1'000'000, 128), 512'000'000u);
    for (std::uint64_t c : {1ull, 17ull, 6'500'000'000ull}) {
        for (std::size_t d : {64u, 128u, 256u, 1024u}) {
            EXPECT_EQ(code_payload_bytes(c, d) * 32, real_payload_bytes(c, d));
        }
    }
}

TEST(Bench, EmptyDatabaseGivesUntimedReport) {
    BenchOptions o;
    o.count = 0;
    const auto r = bench(o);
    EXPECT_EQ(r.code_payload_bytes, 0u);
    EXPECT_EQ(r.real_payload_bytes, 0u);
    EXPECT_FALSE(r.timed);
    EXPECT_EQ(r.hamming_seconds, 0.0);
    const auto j = nlohmann::json::parse(bench_report_json(r));
    EXPECT_EQ(j["count"], 0);
}

TEST(Bench, SmallRunReportsSizesAndTimes) {
    testing_support::TempDir dir;
    BenchOptions o;
    o.count = 20000;
    o.repetitions = 2;
    o.k = 10;
    o.work_dir = dir.path();
    const auto r = bench(o);
    EXPECT_TRUE(r.timed);
    EXPECT_EQ(r.compression_ratio, 32.0);
    EXPECT_EQ(r.database_file_bytes, kDatabaseHeaderBytes + 20000u * 16);
    EXPECT_GT(r.hamming_seconds, 0.0);
    EXPECT_GT(r.cosine_seconds, 0.0);
    EXPECT_EQ(r.real_resident_records, 20000u);
    EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
}

TEST(Bench, MemoryBudgetLimitsResidentRecords) {
    testing_support::TempDir dir;
    BenchOptions o;
    o.count = 10000;
    o.repetitions = 1;
    o.work_dir = dir.path();
    o.real_memory_budget = 1000 * 128 * 4;
    const auto r = bench(o);
    EXPECT_EQ(r.real_resident_records, 1000u);
    EXPECT_EQ(r.real_payload_bytes, 10000u * 128 * 4);
}
