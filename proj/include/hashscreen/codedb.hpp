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
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hashscreen/codes.hpp"

namespace hashscreen {

// Database file: a 20-byte header followed by `count` packed codes.
//
//   offset  size  field
//   0       4     magic "DHDB"
//   4       2     format version (u16, currently 1)
//   6       2     reserved, zero
//   8       4     code_bits (u32)
//   12      8     count (u64)
//   20      ...   count x ceil(code_bits / 64) little-endian u64 words
//
// The optional id sidecar lives next to it at "<path>.ids": UTF-8, one id per line.

inline constexpr char kDatabaseMagic[4] = {'D', 'H', 'D', 'B'};
inline constexpr std::uint16_t kDatabaseVersion = 1;
inline constexpr std::size_t kDatabaseHeaderBytes = 20;

std::filesystem::path id_sidecar_path(const std::filesystem::path& db_path);

/// Streams codes to disk in constant memory. The header count is patched by
/// finish(); a writer destroyed without finish() leaves a valid file with the
/// codes appended so far.
class DatabaseWriter {
 public:
    DatabaseWriter(const std::filesystem::path& path, std::size_t code_bits, bool with_ids = false);
    ~DatabaseWriter();

    DatabaseWriter(const DatabaseWriter&) = delete;
    DatabaseWriter& operator=(const DatabaseWriter&) = delete;

    void append(const BinaryCode& code);
    void append(const BinaryCode& code, const std::string& id);

    std::uint64_t count() const noexcept { return count_; }
    void finish();

 private:
    void append_code(const BinaryCode& code);
    void write_count();

    std::filesystem::path path_;
    std::size_t code_bits_;
    std::uint64_t count_ = 0;
    std::ofstream out_;
    std::optional<std::ofstream> ids_;
    bool finished_ = false;
};

/// Read-only, memory-mapped view of a database file. Opening validates the
/// header and the exact file size; records are paged in on access.
class CodeDatabase {
 public:
    static CodeDatabase open(const std::filesystem::path& path);

    CodeDatabase(CodeDatabase&& other) noexcept;
    CodeDatabase& operator=(CodeDatabase&& other) noexcept;
    CodeDatabase(const CodeDatabase&) = delete;
    CodeDatabase& operator=(const CodeDatabase&) = delete;
    ~CodeDatabase();

    std::size_t code_bits() const noexcept { return code_bits_; }
    std::size_t words_per_code() const noexcept { return words_for_bits(code_bits_); }
    std::uint64_t count() const noexcept { return count_; }
    std::uint64_t file_bytes() const noexcept { return size_; }

    BinaryCode code(std::uint64_t index) const;
    std::vector<BinaryCode> codes() const;

    /// Start of the packed payload.
    const unsigned char* payload() const noexcept { return base_ + kDatabaseHeaderBytes; }

    /// Reads the id sidecar; empty when there is none.
    std::vector<std::string> load_ids() const;

    const std::filesystem::path& path() const noexcept { return path_; }

 private:
    CodeDatabase() = default;
    void release() noexcept;

    std::filesystem::path path_;
    const unsigned char* base_ = nullptr;
    std::uint64_t size_ = 0;
    std::size_t code_bits_ = 0;
    std::uint64_t count_ = 0;
};

/// Writes all codes (and ids, when given) and opens the result.
CodeDatabase build_database(const std::filesystem::path& path, std::size_t code_bits,
                            std::span<const BinaryCode> codes,
                            std::span<const std::string> ids = {});

struct SearchHit {
    std::uint64_t index = 0;
    std::uint32_t distance = 0;

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// k nearest records by Hamming distance, ties by ascending index.
using SearchResult = std::vector<SearchHit>;

struct ScanOptions {
    /// 0 selects default_thread_count().
    std::size_t partitions = 0;
    std::size_t threads = 0;
};

/// Exact exhaustive scan over a packed payload. Each partition keeps a
/// bounded max-heap of size k; partitions are merged by (distance, index).
SearchResult topk_hamming(const unsigned char* payload, std::uint64_t count, std::size_t code_bits,
                          const BinaryCode& query, std::size_t k, ScanOptions options = {});

SearchResult topk_hamming(const CodeDatabase& db, const BinaryCode& query, std::size_t k,
                          ScanOptions options = {});

/// Real-valued baseline store: float32 vectors plus their inverse norms.
class RealVectorStore {
 public:
    explicit RealVectorStore(std::size_t dim);

    void reserve(std::size_t count);
    void add(std::span<const float> vec);
    void add(std::span<const double> vec);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t count() const noexcept { return inv_norms_.size(); }
    const float* row(std::size_t i) const noexcept { return values_.data() + i * dim_; }
    float inv_norm(std::size_t i) const noexcept { return inv_norms_[i]; }
    std::uint64_t payload_bytes() const noexcept { return values_.size() * sizeof(float); }

 private:
    std::size_t dim_;
    std::vector<float> values_;
    std::vector<float> inv_norms_;
};

struct ScoredHit {
    std::uint64_t index = 0;
    double score = 0.0;

    friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

/// k most cosine-similar records, ties by ascending index. `index_offset` is
/// added to every reported index.
std::vector<ScoredHit> topk_cosine(const RealVectorStore& store, std::span<const double> query,
                                   std::size_t k, ScanOptions options = {},
                                   std::uint64_t index_offset = 0);

/// Merges per-block results into a global top-k.
std::vector<ScoredHit> merge_topk(std::vector<ScoredHit> hits, std::size_t k);

struct BenchOptions {
    std::uint64_t count = 1'000'000;
    std::size_t code_bits = 128;
    std::size_t repetitions = 5;
    std::size_t k = 100;
    std::uint64_t seed = 1;
    std::filesystem::path work_dir = std::filesystem::temp_directory_path();
    /// Largest real-valued store kept resident. Larger baselines are scanned
    /// by re-reading a resident block with shifted record indices.
    std::uint64_t real_memory_budget = std::uint64_t{1} << 30;
    ScanOptions scan;
};

struct BenchReport {
    std::uint64_t count = 0;
    std::size_t code_bits = 0;
    std::uint64_t code_payload_bytes = 0;
    std::uint64_t real_payload_bytes = 0;
    std::uint64_t database_file_bytes = 0;
    double compression_ratio = 0.0;
    double hamming_seconds = 0.0;
    double cosine_seconds = 0.0;
    double speedup = 0.0;
    std::size_t repetitions = 0;
    std::uint64_t real_resident_records = 0;
    bool timed = false;
};

/// Payload sizes for `count` codes of `code_bits` bits, packed vs float32.
std::uint64_t code_payload_bytes(std::uint64_t count, std::size_t code_bits);
std::uint64_t real_payload_bytes(std::uint64_t count, std::size_t code_bits);

/// Builds a random on-disk database and times full-database top-k scans in
/// both modes; reports medians over the repetitions.
BenchReport bench(const BenchOptions& options);

std::string bench_report_json(const BenchReport& report);

}  // namespace hashscreen
