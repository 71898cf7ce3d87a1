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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hashscreen/codes.hpp"
#include "hashscreen/error.hpp"
#include "support/oracles.hpp"

using namespace hashscreen;

namespace {

std::string bits_of(const BinaryCode& c) { return to_bit_string(c); }

BinaryCode random_code(std::mt19937_64& rng, std::size_t bits) {
    BinaryCode c(bits);
    for (std::size_t i = 0; i < bits; ++i) {
        c.set_bit(i, (rng() & 1) != 0);
    }
    return c;
}

std::vector<int> unpacked01(const BinaryCode& c) {
    std::vector<int> v(c.n_bits());
    for (std::size_t i = 0; i < c.n_bits(); ++i) v[i] = c.bit(i) ? 1 : 0;
    return v;
}

}  // namespace

TEST(SignQuantize, ExactSigns) {
    const std::vector<double> e{1.0, -1.0, 1.0, 1.0};
    EXPECT_EQ(bits_of(sign_quantize(e)), "1011");
}

TEST(SignQuantize, ZeroMapsToMinusOne) {
    const std::vector<double> e{0.3, -0.2, 0.0, -7.1};
    EXPECT_EQ(bits_of(sign_quantize(e)), "1000");
    const std::vector<double> neg_zero{-0.0};
    EXPECT_EQ(bits_of(sign_quantize(neg_zero)), "0");
}

TEST(SignQuantize, IdempotentOnUnpackedCodes) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 1000; ++t) {
        const auto c = random_code(rng, 1 + rng() % 300);
        EXPECT_EQ(sign_quantize(code_to_embedding(c)), c);
    }
}

TEST(SignQuantize, ScaleInvariant) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> e(77);
        for (auto& v : e) v = nd(rng);
        auto scaled = e;
        const double c = std::exp(nd(rng) * 3.0);
        for (auto& v : scaled) v *= c;
        EXPECT_EQ(sign_quantize(e), sign_quantize(scaled));
    }
}

TEST(SignQuantize, RejectsNonFinite) {
    const std::vector<double> e{1.0, std::numeric_limits<double>::quiet_NaN()};
    EXPECT_THROW(sign_quantize(e), Error);
    const std::vector<double> f{std::numeric_limits<double>::infinity()};
    EXPECT_THROW(sign_quantize(f), Error);
}

TEST(PackBits, AllPlusOneIsAllOnesWord) {
    const std::vector<std::int8_t> s(64, 1);
    const auto c = pack_bits(s);
    ASSERT_EQ(c.n_words(), 1u);
    EXPECT_EQ(c.words()[0], ~std::uint64_t{0});
}

TEST(PackBits, AllMinusOneIsZeroWords) {
    const std::vector<std::int8_t> s(200, -1);
    const auto c = pack_bits(s);
    ASSERT_EQ(c.n_words(), 4u);
    for (auto w : c.words()) EXPECT_EQ(w, 0u);
}

TEST(PackBits, LittleEndianBitLayout) {
    std::vector<std::int8_t> s(130, -1);
    s[0] = 1;
    s[63] = 1;
    s[64] = 1;
    s[129] = 1;
    const auto c = pack_bits(s);
    ASSERT_EQ(c.n_words(), 3u);
    EXPECT_EQ(c.words()[0], (std::uint64_t{1} << 63) | 1u);
    EXPECT_EQ(c.words()[1], 1u);
    EXPECT_EQ(c.words()[2], 2u);
}

TEST(PackBits, RejectsNonSigns) {
    const std::vector<std::int8_t> s{1, 0, -1};
    EXPECT_THROW(pack_bits(s), Error);
}

TEST(PackBits, RandomRoundtrip) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t d = 1 + rng() % 520;
        std::vector<std::int8_t> s(d);
        for (auto& v : s) v = (rng() & 1) ? 1 : -1;
        const auto c = pack_bits(s);
        EXPECT_EQ(unpack_bits(c), s);
        EXPECT_EQ(pack_bits(unpack_bits(c)), c);
        EXPECT_EQ(c.n_words(), (d + 63) / 64);
        EXPECT_EQ(c.words().back() & ~tail_mask(d), 0u);
    }
}

TEST(BinaryCode, FromWordsRejectsPaddingAndWordCount) {
    EXPECT_NO_THROW(BinaryCode::from_words(65, {~std::uint64_t{0}, 1}));
    EXPECT_THROW(BinaryCode::from_words(65, {0, 2}), Error);
    EXPECT_THROW(BinaryCode::from_words(65, {0}), Error);
    EXPECT_THROW(BinaryCode::from_words(64, {0, 0}), Error);
}

TEST(BinaryCode, ComplementKeepsPaddingZero) {
    const BinaryCode c(70);
    const auto k = c.complement();
    EXPECT_EQ(k.words()[1], tail_mask(70));
    EXPECT_EQ(k.complement(), c);
}

TEST(Hamming, IdentityIsZero) {
    std::mt19937_64 rng(14);
    const auto a = random_code(rng, 128);
    EXPECT_EQ(hamming_distance(a, a), 0u);
}

TEST(Hamming, ComplementIsFullLength) {
    std::mt19937_64 rng(15);
    const auto a = random_code(rng, 128);
    EXPECT_EQ(hamming_distance(a, a.complement()), 128u);
    const auto b = random_code(rng, 77);
    EXPECT_EQ(hamming_distance(b, b.complement()), 77u);
}

TEST(Hamming, MatchesPerBitOracleAndDotIdentity) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 1 + rng() % 300;
        const auto a = random_code(rng, d);
        const auto b = random_code(rng, d);
        const auto h = hamming_distance(a, b);
        EXPECT_EQ(h, oracle::hamming(unpacked01(a), unpacked01(b)));
        const double dp = oracle::dot(code_to_embedding(a), code_to_embedding(b));
        EXPECT_EQ(dp, static_cast<double>(d) - 2.0 * h);
    }
}

TEST(Hamming, MetricProperties) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
        const std::size_t d = 1 + rng() % 200;
        const auto a = random_code(rng, d);
        const auto b = random_code(rng, d);
        const auto c = random_code(rng, d);
        EXPECT_EQ(hamming_distance(a, b), hamming_distance(b, a));
        EXPECT_LE(hamming_distance(a, c), hamming_distance(a, b) + hamming_distance(b, c));
    }
}

TEST(Hamming, LengthMismatchThrows) {
    EXPECT_THROW(hamming_distance(BinaryCode(64), BinaryCode(65)), Error);
}

TEST(Hamming, PaddingNeverContributes) {
    // Dirty padding cannot be constructed through the public API, so compare
    // raw words with and without garbage beyond the final bit.
    const std::uint64_t a[2] = {0x0123456789abcdefULL, 0x5};
    const std::uint64_t b[2] = {0x0123456789abcdefULL, 0xfffffffffffffff5ULL};
    EXPECT_EQ(hamming_words(a, b, 2, tail_mask(67)), 0u);
}

TEST(Cosine, SelfSimilarityIsOne) {
    const std::vector<double> a{0.3, -2.0, 5.5};
    EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
}

TEST(Cosine, OrthogonalAxesAreZero) {
    const std::vector<double> e1{1.0, 0.0, 0.0};
    const std::vector<double> e2{0.0, 1.0, 0.0};
    EXPECT_EQ(cosine_similarity(e1, e2), 0.0);
}

TEST(Cosine, SignVectorsMatchHammingIdentity) {
    std::mt19937_64 rng(18);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 1 + rng() % 256;
        const auto a = random_code(rng, d);
        const auto b = random_code(rng, d);
        const double expected =
            (static_cast<double>(d) - 2.0 * hamming_distance(a, b)) / static_cast<double>(d);
        EXPECT_NEAR(cosine_similarity(code_to_embedding(a), code_to_embedding(b)), expected,
                    1e-15);
    }
}

TEST(Cosine, HammingOrderEqualsCosineOrder) {
    std::mt19937_64 rng(19);
    const std::size_t d = 96;
    const auto q = random_code(rng, d);
    std::vector<BinaryCode> db;
    for (int i = 0; i < 300; ++i) db.push_back(random_code(rng, d));
    for (std::size_t i = 0; i < db.size(); ++i) {
        for (std::size_t j = 0; j < db.size(); ++j) {
            const bool closer = hamming_distance(q, db[i]) < hamming_distance(q, db[j]);
            const bool more_similar = cosine_similarity(code_to_embedding(q), code_to_embedding(db[i])) >
                                      cosine_similarity(code_to_embedding(q), code_to_embedding(db[j]));
            EXPECT_EQ(closer, more_similar);
        }
    }
}

TEST(Cosine, DegenerateAndMismatchedInputsThrow) {
    const std::vector<double> z{0.0, 0.0};
    const std::vector<double> a{1.0, 2.0};
    try {
        cosine_similarity(z, a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.type(), ErrorType::kDegenerateInput);
    }
    const std::vector<double> b{1.0};
    EXPECT_THROW(cosine_similarity(a, b), Error);
}

TEST(BitString, RoundtripAndValidation) {
    const auto c = parse_bit_string("10110");
    EXPECT_TRUE(c.bit(0));
    EXPECT_FALSE(c.bit(1));
    EXPECT_EQ(to_bit_string(c), "10110");
    EXPECT_THROW(parse_bit_string(""), Error);
    EXPECT_THROW(parse_bit_string("10x"), Error);
}
