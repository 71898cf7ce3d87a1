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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hashscreen {

/// Real-valued encoder output, one entry per code bit.
using Embedding = std::vector<double>;

constexpr std::size_t words_for_bits(std::size_t n_bits) { return (n_bits + 63) / 64; }

/// Mask of the valid bits in the final word of an n_bits code.
constexpr std::uint64_t tail_mask(std::size_t n_bits) {
    const std::size_t rem = n_bits % 64;
    return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

/// Hamming distance over packed words; the final word is masked with
/// `last_mask` so padding bits can never contribute.
inline std::uint32_t hamming_words(const std::uint64_t* a, const std::uint64_t* b,
                                   std::size_t n_words, std::uint64_t last_mask) {
    std::uint32_t dist = 0;
    for (std::size_t w = 0; w + 1 < n_words; ++w) {
        dist += static_cast<std::uint32_t>(std::popcount(a[w] ^ b[w]));
    }
    if (n_words > 0) {
        dist += static_cast<std::uint32_t>(
            std::popcount((a[n_words - 1] ^ b[n_words - 1]) & last_mask));
    }
    return dist;
}

/// A d-bit hash code. Bit i of word j holds dimension 64*j + i; a set bit
/// stands for +1 and a clear bit for -1. Padding bits past d are always 0.
class BinaryCode {
 public:
    BinaryCode() = default;

    /// All-minus-one code of the given length.
    explicit BinaryCode(std::size_t n_bits);

    /// Adopts packed words; rejects wrong word counts and nonzero padding.
    static BinaryCode from_words(std::size_t n_bits, std::vector<std::uint64_t> words);

    std::size_t n_bits() const noexcept { return n_bits_; }
    std::size_t n_words() const noexcept { return words_.size(); }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    bool bit(std::size_t i) const;
    void set_bit(std::size_t i, bool value);

    /// Bitwise complement within the first n_bits bits.
    BinaryCode complement() const;

    friend bool operator==(const BinaryCode&, const BinaryCode&) = default;

 private:
    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

/// bit i = 1 iff e[i] > 0. Zero maps to -1.
BinaryCode sign_quantize(std::span<const double> embedding);

/// Packs a {-1,+1} sign vector.
BinaryCode pack_bits(std::span<const std::int8_t> signs);

/// Expands a code into its {-1,+1} sign vector.
std::vector<std::int8_t> unpack_bits(const BinaryCode& code);

/// The +-1 vector of a code as reals, for cosine-mode comparisons.
Embedding code_to_embedding(const BinaryCode& code);

std::uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b);

/// Norms below this are rejected by cosine_similarity.
inline constexpr double kMinNorm = 1e-12;

/// a.b / (|a| |b|), clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Text form: one '0'/'1' character per bit, bit 0 first.
std::string to_bit_string(const BinaryCode& code);
BinaryCode parse_bit_string(std::string_view text);

}  // namespace hashscreen
