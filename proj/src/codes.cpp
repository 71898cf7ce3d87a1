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

#include "hashscreen/codes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hashscreen/error.hpp"

namespace hashscreen {

std::string_view to_string(ErrorType type) {
    switch (type) {
        case ErrorType::kInvalidInput: return "invalid_input";
        case ErrorType::kDegenerateInput: return "degenerate_input";
        case ErrorType::kUndefinedMetric: return "undefined_metric";
        case ErrorType::kShapeMismatch: return "shape";
        case ErrorType::kParse: return "parse";
        case ErrorType::kNotFound: return "not_found";
        case ErrorType::kCorruptDatabase: return "corrupt_database";
        case ErrorType::kTrainingDiverged: return "diverged";
        case ErrorType::kIo: return "io";
    }
    return "unknown";
}

BinaryCode::BinaryCode(std::size_t n_bits) : n_bits_(n_bits), words_(words_for_bits(n_bits), 0) {
    if (n_bits == 0) {
        fail(ErrorType::kInvalidInput, "code length must be positive");
    }
}

BinaryCode BinaryCode::from_words(std::size_t n_bits, std::vector<std::uint64_t> words) {
    if (n_bits == 0) {
        fail(ErrorType::kInvalidInput, "code length must be positive");
    }
    if (words.size() != words_for_bits(n_bits)) {
        fail(ErrorType::kInvalidInput,
             "expected " + std::to_string(words_for_bits(n_bits)) + " words for " +
                 std::to_string(n_bits) + " bits, got " + std::to_string(words.size()));
    }
    if ((words.back() & ~tail_mask(n_bits)) != 0) {
        fail(ErrorType::kInvalidInput, "padding bits beyond code length are set");
    }
    BinaryCode code;
    code.n_bits_ = n_bits;
    code.words_ = std::move(words);
    return code;
}

bool BinaryCode::bit(std::size_t i) const {
    if (i >= n_bits_) {
        fail(ErrorType::kInvalidInput, "bit index out of range");
    }
    return (words_[i / 64] >> (i % 64)) & 1U;
}

void BinaryCode::set_bit(std::size_t i, bool value) {
    if (i >= n_bits_) {
        fail(ErrorType::kInvalidInput, "bit index out of range");
    }
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value) {
        words_[i / 64] |= mask;
    } else {
        words_[i / 64] &= ~mask;
    }
}

BinaryCode BinaryCode::complement() const {
    BinaryCode out = *this;
    for (auto& w : out.words_) {
        w = ~w;
    }
    if (!out.words_.empty()) {
        out.words_.back() &= tail_mask(n_bits_);
    }
    return out;
}

BinaryCode sign_quantize(std::span<const double> embedding) {
    BinaryCode code(embedding.size());
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (!std::isfinite(embedding[i])) {
            fail(ErrorType::kInvalidInput,
                 "non-finite embedding entry at dimension " + std::to_string(i));
        }
        if (embedding[i] > 0.0) {
            code.set_bit(i, true);
        }
    }
    return code;
}

BinaryCode pack_bits(std::span<const std::int8_t> signs) {
    BinaryCode code(signs.size());
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] == 1) {
            code.set_bit(i, true);
        } else if (signs[i] != -1) {
            fail(ErrorType::kInvalidInput,
                 "sign vector entry " + std::to_string(i) + " is not -1 or +1");
        }
    }
    return code;
}

std::vector<std::int8_t> unpack_bits(const BinaryCode& code) {
    std::vector<std::int8_t> signs(code.n_bits());
    for (std::size_t i = 0; i < signs.size(); ++i) {
        signs[i] = code.bit(i) ? 1 : -1;
    }
    return signs;
}

Embedding code_to_embedding(const BinaryCode& code) {
    Embedding e(code.n_bits());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = code.bit(i) ? 1.0 : -1.0;
    }
    return e;
}

std::uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b) {
    if (a.n_bits() != b.n_bits()) {
        fail(ErrorType::kInvalidInput, "hamming distance between codes of " +
                                           std::to_string(a.n_bits()) + " and " +
                                           std::to_string(b.n_bits()) + " bits");
    }
    return hamming_words(a.words().data(), b.words().data(), a.n_words(), tail_mask(a.n_bits()));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        fail(ErrorType::kInvalidInput, "cosine similarity between vectors of length " +
                                           std::to_string(a.size()) + " and " +
                                           std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (!(na >= kMinNorm) || !(nb >= kMinNorm)) {
        fail(ErrorType::kDegenerateInput, "cosine similarity of a near-zero-norm vector");
    }
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

std::string to_bit_string(const BinaryCode& code) {
    std::string out(code.n_bits(), '0');
    for (std::size_t i = 0; i < code.n_bits(); ++i) {
        if (code.bit(i)) {
            out[i] = '1';
        }
    }
    return out;
}

BinaryCode parse_bit_string(std::string_view text) {
    if (text.empty()) {
        fail(ErrorType::kInvalidInput, "empty bit string");
    }
    BinaryCode code(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1') {
            fail(ErrorType::kInvalidInput,
                 "bit string has '" + std::string(1, text[i]) + "' at position " + std::to_string(i));
        }
        code.set_bit(i, text[i] == '1');
    }
    return code;
}

}  // namespace hashscreen
