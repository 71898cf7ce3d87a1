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

#include "hashscreen/codedb.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <queue>

#include <nlohmann/json.hpp>

#include "hashscreen/binary_io.hpp"
#include "hashscreen/error.hpp"
#include "hashscreen/parallel.hpp"
#include "hashscreen/rng.hpp"

namespace hashscreen {

namespace {

void corrupt(const std::filesystem::path& path, const std::string& check, const std::string& detail) {
    fail(ErrorType::kCorruptDatabase,
         "corrupt database " + path.string() + ": check '" + check + "' failed: " + detail);
}

ScanOptions resolve(ScanOptions o) {
    if (o.threads == 0) {
        o.threads = default_thread_count();
    }
    if (o.partitions == 0) {
        o.partitions = o.threads;
    }
    return o;
}

bool hit_less(const SearchHit& a, const SearchHit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
}

// "a ranks before b": higher score first, then lower index.
bool scored_before(const ScoredHit& a, const ScoredHit& b) {
    return a.score != b.score ? a.score > b.score : a.index < b.index;
}

float dot_f32(const float* a, const float* b, std::size_t d) {
    float acc[8] = {};
    std::size_t i = 0;
    for (; i + 8 <= d; i += 8) {
        for (std::size_t j = 0; j < 8; ++j) {
            acc[j] += a[i + j] * b[i + j];
        }
    }
    for (; i < d; ++i) {
        acc[0] += a[i] * b[i];
    }
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

std::vector<ScoredHit> scan_cosine(const RealVectorStore& store, std::span<const double> query,
                                   std::size_t rows, std::size_t k, ScanOptions options,
                                   std::uint64_t index_offset) {
    if (query.size() != store.dim()) {
        fail(ErrorType::kInvalidInput, "query has " + std::to_string(query.size()) +
                                           " dimensions, store has " + std::to_string(store.dim()));
    }
    if (k == 0) {
        fail(ErrorType::kInvalidInput, "k must be at least 1");
    }
    double qnorm = 0.0;
    for (double v : query) {
        qnorm += v * v;
    }
    qnorm = std::sqrt(qnorm);
    if (!(qnorm >= kMinNorm)) {
        fail(ErrorType::kDegenerateInput, "query vector has near-zero norm");
    }
    std::vector<float> q(query.begin(), query.end());
    const double q_inv = 1.0 / qnorm;
    const std::size_t d = store.dim();

    options = resolve(options);
    std::vector<std::vector<ScoredHit>> partials(options.partitions);
    parallel_ranges(rows, options.partitions, options.threads,
                    [&](std::size_t part, std::size_t begin, std::size_t end) {
                        auto worse = [](const ScoredHit& a, const ScoredHit& b) {
                            return scored_before(a, b);
                        };
                        std::priority_queue<ScoredHit, std::vector<ScoredHit>, decltype(worse)> heap(worse);
                        for (std::size_t i = begin; i < end; ++i) {
                            const double s = static_cast<double>(dot_f32(store.row(i), q.data(), d)) *
                                             static_cast<double>(store.inv_norm(i)) * q_inv;
                            if (heap.size() < k) {
                                heap.push({i + index_offset, s});
                            } else if (s > heap.top().score) {
                                heap.pop();
                                heap.push({i + index_offset, s});
                            }
                        }
                        auto& out = partials[part];
                        out.reserve(heap.size());
                        while (!heap.empty()) {
                            out.push_back(heap.top());
                            heap.pop();
                        }
                    });
    std::vector<ScoredHit> all;
    for (auto& p : partials) {
        all.insert(all.end(), p.begin(), p.end());
    }
    return merge_topk(std::move(all), k);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::filesystem::path id_sidecar_path(const std::filesystem::path& db_path) {
    auto p = db_path;
    p += ".ids";
    return p;
}

DatabaseWriter::DatabaseWriter(const std::filesystem::path& path, std::size_t code_bits, bool with_ids)
    : path_(path), code_bits_(code_bits) {
    if (code_bits == 0 || code_bits > 0xFFFFFFFFu) {
        fail(ErrorType::kInvalidInput, "code length must be in [1, 2^32)");
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) {
        fail(ErrorType::kIo, "cannot open database for writing: " + path.string());
    }
    out_.write(kDatabaseMagic, 4);
    io::put<std::uint16_t>(out_, kDatabaseVersion);
    io::put<std::uint16_t>(out_, 0);
    io::put<std::uint32_t>(out_, static_cast<std::uint32_t>(code_bits));
    io::put<std::uint64_t>(out_, 0);
    if (with_ids) {
        ids_.emplace(id_sidecar_path(path), std::ios::binary | std::ios::trunc);
        if (!*ids_) {
            fail(ErrorType::kIo, "cannot open id sidecar for writing: " + id_sidecar_path(path).string());
        }
    }
    if (!out_) {
        fail(ErrorType::kIo, "failed writing database header: " + path.string());
    }
}

DatabaseWriter::~DatabaseWriter() {
    if (!finished_) {
        try {
            finish();
        } catch (...) {
        }
    }
}

void DatabaseWriter::append(const BinaryCode& code) {
    if (ids_) {
        fail(ErrorType::kInvalidInput, "this database is being written with ids; pass one per code");
    }
    append_code(code);
}

void DatabaseWriter::append(const BinaryCode& code, const std::string& id) {
    if (!ids_) {
        fail(ErrorType::kInvalidInput, "database writer was opened without ids");
    }
    if (id.find('\n') != std::string::npos) {
        fail(ErrorType::kInvalidInput, "id contains a newline");
    }
    append_code(code);
    *ids_ << id << '\n';
    if (!*ids_) {
        fail(ErrorType::kIo, "failed writing id sidecar for " + path_.string());
    }
}

void DatabaseWriter::append_code(const BinaryCode& code) {
    if (finished_) {
        fail(ErrorType::kInvalidInput, "database writer already finished");
    }
    if (code.n_bits() != code_bits_) {
        fail(ErrorType::kInvalidInput, "code " + std::to_string(count_) + " has " +
                                           std::to_string(code.n_bits()) + " bits, database holds " +
                                           std::to_string(code_bits_));
    }
    for (std::uint64_t w : code.words()) {
        io::put(out_, w);
    }
    if (!out_) {
        fail(ErrorType::kIo, "failed writing database payload: " + path_.string());
    }
    ++count_;
}

void DatabaseWriter::write_count() {
    out_.seekp(12);
    io::put<std::uint64_t>(out_, count_);
    out_.seekp(0, std::ios::end);
}

void DatabaseWriter::finish() {
    if (finished_) {
        return;
    }
    finished_ = true;
    write_count();
    out_.close();
    if (!out_) {
        fail(ErrorType::kIo, "failed finalizing database: " + path_.string());
    }
    if (ids_) {
        ids_->close();
        if (!*ids_) {
            fail(ErrorType::kIo, "failed finalizing id sidecar for " + path_.string());
        }
    }
}

CodeDatabase CodeDatabase::open(const std::filesystem::path& path) {
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) {
        fail(ErrorType::kNotFound, "cannot open database: " + path.string());
    }
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
        ::close(fd);
        fail(ErrorType::kIo, "cannot stat database: " + path.string());
    }
    const auto size = static_cast<std::uint64_t>(st.st_size);
    if (size < kDatabaseHeaderBytes) {
        ::close(fd);
        corrupt(path, "size", "file is " + std::to_string(size) + " bytes, shorter than the header");
    }
    void* mapped = ::mmap(nullptr, size, PROT_READ, MAP_SHARED, fd, 0);
    ::close(fd);
    if (mapped == MAP_FAILED) {
        fail(ErrorType::kIo, "cannot map database: " + path.string());
    }

    CodeDatabase db;
    db.path_ = path;
    db.base_ = static_cast<const unsigned char*>(mapped);
    db.size_ = size;

    const unsigned char* h = db.base_;
    if (std::memcmp(h, kDatabaseMagic, 4) != 0) {
        corrupt(path, "magic", "expected \"DHDB\"");
    }
    std::uint16_t version = 0;
    std::uint16_t reserved = 0;
    std::uint32_t bits = 0;
    std::uint64_t count = 0;
    std::memcpy(&version, h + 4, 2);
    std::memcpy(&reserved, h + 6, 2);
    std::memcpy(&bits, h + 8, 4);
    std::memcpy(&count, h + 12, 8);
    version = io::to_little_endian(version);
    reserved = io::to_little_endian(reserved);
    bits = io::to_little_endian(bits);
    count = io::to_little_endian(count);
    if (version != kDatabaseVersion) {
        corrupt(path, "version", "unsupported version " + std::to_string(version));
    }
    if (reserved != 0) {
        corrupt(path, "reserved", "reserved header field is nonzero");
    }
    if (bits == 0) {
        corrupt(path, "code_bits", "code length is zero");
    }
    const std::uint64_t record_bytes = words_for_bits(bits) * 8;
    if (count > (size - kDatabaseHeaderBytes) / record_bytes ||
        size != kDatabaseHeaderBytes + count * record_bytes) {
        corrupt(path, "size", "file is " + std::to_string(size) + " bytes, header implies " +
                                  std::to_string(kDatabaseHeaderBytes) + " + " + std::to_string(count) +
                                  " x " + std::to_string(record_bytes));
    }
    db.code_bits_ = bits;
    db.count_ = count;
    return db;
}

CodeDatabase::CodeDatabase(CodeDatabase&& other) noexcept { *this = std::move(other); }

CodeDatabase& CodeDatabase::operator=(CodeDatabase&& other) noexcept {
    if (this != &other) {
        release();
        path_ = std::move(other.path_);
        base_ = std::exchange(other.base_, nullptr);
        size_ = std::exchange(other.size_, 0);
        code_bits_ = std::exchange(other.code_bits_, 0);
        count_ = std::exchange(other.count_, 0);
    }
    return *this;
}

CodeDatabase::~CodeDatabase() { release(); }

void CodeDatabase::release() noexcept {
    if (base_ != nullptr) {
        ::munmap(const_cast<unsigned char*>(base_), size_);
        base_ = nullptr;
    }
}

BinaryCode CodeDatabase::code(std::uint64_t index) const {
    if (index >= count_) {
        fail(ErrorType::kInvalidInput, "record " + std::to_string(index) + " out of range (count " +
                                           std::to_string(count_) + ")");
    }
    const std::size_t nw = words_per_code();
    const unsigned char* rec = payload() + index * nw * 8;
    std::vector<std::uint64_t> words(nw);
    for (std::size_t w = 0; w < nw; ++w) {
        words[w] = io::load_u64(rec + w * 8);
    }
    if ((words.back() & ~tail_mask(code_bits_)) != 0) {
        corrupt(path_, "padding", "record " + std::to_string(index) + " has padding bits set");
    }
    return BinaryCode::from_words(code_bits_, std::move(words));
}

std::vector<BinaryCode> CodeDatabase::codes() const {
    std::vector<BinaryCode> out;
    out.reserve(count_);
    for (std::uint64_t i = 0; i < count_; ++i) {
        out.push_back(code(i));
    }
    return out;
}

std::vector<std::string> CodeDatabase::load_ids() const {
    std::vector<std::string> ids;
    const auto sidecar = id_sidecar_path(path_);
    if (!std::filesystem::exists(sidecar)) {
        return ids;
    }
    std::ifstream in(sidecar, std::ios::binary);
    if (!in) {
        fail(ErrorType::kIo, "cannot read id sidecar: " + sidecar.string());
    }
    std::string line;
    while (std::getline(in, line)) {
        ids.push_back(line);
    }
    if (ids.size() != count_) {
        corrupt(path_, "ids", "sidecar has " + std::to_string(ids.size()) + " ids for " +
                                  std::to_string(count_) + " records");
    }
    return ids;
}

CodeDatabase build_database(const std::filesystem::path& path, std::size_t code_bits,
                            std::span<const BinaryCode> codes, std::span<const std::string> ids) {
    if (!ids.empty() && ids.size() != codes.size()) {
        fail(ErrorType::kInvalidInput, "got " + std::to_string(ids.size()) + " ids for " +
                                           std::to_string(codes.size()) + " codes");
    }
    {
        DatabaseWriter writer(path, code_bits, !ids.empty());
        for (std::size_t i = 0; i < codes.size(); ++i) {
            if (ids.empty()) {
                writer.append(codes[i]);
            } else {
                writer.append(codes[i], ids[i]);
            }
        }
        writer.finish();
    }
    return CodeDatabase::open(path);
}

SearchResult topk_hamming(const unsigned char* payload, std::uint64_t count, std::size_t code_bits,
                          const BinaryCode& query, std::size_t k, ScanOptions options) {
    if (query.n_bits() != code_bits) {
        fail(ErrorType::kInvalidInput, "query has " + std::to_string(query.n_bits()) +
                                           " bits, database holds " + std::to_string(code_bits));
    }
    if (k == 0) {
        fail(ErrorType::kInvalidInput, "k must be at least 1");
    }
    options = resolve(options);
    const std::size_t nw = words_for_bits(code_bits);
    const std::uint64_t mask = tail_mask(code_bits);
    const std::size_t record_bytes = nw * 8;
    const std::vector<std::uint64_t> q(query.words().begin(), query.words().end());

    std::vector<std::vector<SearchHit>> partials(options.partitions);
    parallel_ranges(count, options.partitions, options.threads,
                    [&](std::size_t part, std::size_t begin, std::size_t end) {
                        // Max-heap on (distance, index): top is the current worst kept hit.
                        std::priority_queue<SearchHit, std::vector<SearchHit>, decltype(&hit_less)> heap(
                            &hit_less);
                        std::vector<std::uint64_t> rec(nw);
                        for (std::size_t i = begin; i < end; ++i) {
                            const unsigned char* p = payload + i * record_bytes;
                            for (std::size_t w = 0; w < nw; ++w) {
                                rec[w] = io::load_u64(p + w * 8);
                            }
                            const std::uint32_t dist = hamming_words(rec.data(), q.data(), nw, mask);
                            if (heap.size() < k) {
                                heap.push({i, dist});
                            } else if (dist < heap.top().distance) {
                                // Indices increase within a partition, so an equal
                                // distance never displaces the current worst.
                                heap.pop();
                                heap.push({i, dist});
                            }
                        }
                        auto& out = partials[part];
                        out.reserve(heap.size());
                        while (!heap.empty()) {
                            out.push_back(heap.top());
                            heap.pop();
                        }
                    });
    SearchResult all;
    for (auto& p : partials) {
        all.insert(all.end(), p.begin(), p.end());
    }
    std::sort(all.begin(), all.end(), hit_less);
    if (all.size() > k) {
        all.resize(k);
    }
    return all;
}

SearchResult topk_hamming(const CodeDatabase& db, const BinaryCode& query, std::size_t k,
                          ScanOptions options) {
    return topk_hamming(db.payload(), db.count(), db.code_bits(), query, k, options);
}

RealVectorStore::RealVectorStore(std::size_t dim) : dim_(dim) {
    if (dim == 0) {
        fail(ErrorType::kInvalidInput, "vector dimension must be positive");
    }
}

void RealVectorStore::reserve(std::size_t count) {
    values_.reserve(count * dim_);
    inv_norms_.reserve(count);
}

void RealVectorStore::add(std::span<const float> vec) {
    if (vec.size() != dim_) {
        fail(ErrorType::kInvalidInput, "vector has " + std::to_string(vec.size()) +
                                           " dimensions, store has " + std::to_string(dim_));
    }
    double norm = 0.0;
    for (float v : vec) {
        if (!std::isfinite(v)) {
            fail(ErrorType::kInvalidInput, "non-finite vector entry");
        }
        norm += static_cast<double>(v) * v;
    }
    norm = std::sqrt(norm);
    if (!(norm >= kMinNorm)) {
        fail(ErrorType::kDegenerateInput, "vector " + std::to_string(count()) + " has near-zero norm");
    }
    values_.insert(values_.end(), vec.begin(), vec.end());
    inv_norms_.push_back(static_cast<float>(1.0 / norm));
}

void RealVectorStore::add(std::span<const double> vec) {
    std::vector<float> f(vec.begin(), vec.end());
    add(std::span<const float>(f));
}

std::vector<ScoredHit> topk_cosine(const RealVectorStore& store, std::span<const double> query,
                                   std::size_t k, ScanOptions options, std::uint64_t index_offset) {
    return scan_cosine(store, query, store.count(), k, options, index_offset);
}

std::vector<ScoredHit> merge_topk(std::vector<ScoredHit> hits, std::size_t k) {
    std::sort(hits.begin(), hits.end(), scored_before);
    if (hits.size() > k) {
        hits.resize(k);
    }
    return hits;
}

std::uint64_t code_payload_bytes(std::uint64_t count, std::size_t code_bits) {
    return count * words_for_bits(code_bits) * 8;
}

std::uint64_t real_payload_bytes(std::uint64_t count, std::size_t code_bits) {
    return count * code_bits * sizeof(float);
}

BenchReport bench(const BenchOptions& options) {
    if (options.code_bits == 0) {
        fail(ErrorType::kInvalidInput, "code length must be positive");
    }
    BenchReport report;
    report.count = options.count;
    report.code_bits = options.code_bits;
    report.code_payload_bytes = code_payload_bytes(options.count, options.code_bits);
    report.real_payload_bytes = real_payload_bytes(options.count, options.code_bits);
    report.repetitions = options.repetitions;
    if (report.code_payload_bytes > 0) {
        report.compression_ratio = static_cast<double>(report.real_payload_bytes) /
                                   static_cast<double>(report.code_payload_bytes);
    }
    if (options.count == 0 || options.repetitions == 0) {
        report.repetitions = 0;
        return report;
    }

    Rng rng(options.seed);
    const std::size_t nw = words_for_bits(options.code_bits);
    const std::uint64_t mask = tail_mask(options.code_bits);
    auto random_code = [&] {
        std::vector<std::uint64_t> words(nw);
        for (auto& w : words) {
            w = rng.next();
        }
        words.back() &= mask;
        return BinaryCode::from_words(options.code_bits, std::move(words));
    };

    std::error_code ec;
    std::filesystem::create_directories(options.work_dir, ec);
    const auto db_path = options.work_dir /
                         ("hashscreen_bench_" + std::to_string(::getpid()) + "_" +
                          std::to_string(options.seed) + ".dhdb");
    struct Cleanup {
        std::filesystem::path path;
        ~Cleanup() {
            std::error_code ignored;
            std::filesystem::remove(path, ignored);
        }
    } cleanup{db_path};

    {
        DatabaseWriter writer(db_path, options.code_bits);
        for (std::uint64_t i = 0; i < options.count; ++i) {
            writer.append(random_code());
        }
        writer.finish();
    }
    const auto db = CodeDatabase::open(db_path);
    report.database_file_bytes = db.file_bytes();

    const std::uint64_t budget_records =
        std::max<std::uint64_t>(1, options.real_memory_budget / (options.code_bits * sizeof(float)));
    const std::uint64_t resident = std::min(options.count, budget_records);
    report.real_resident_records = resident;
    RealVectorStore store(options.code_bits);
    store.reserve(resident);
    std::vector<float> vec(options.code_bits);
    for (std::uint64_t i = 0; i < resident; ++i) {
        for (auto& v : vec) {
            v = static_cast<float>(rng.normal());
        }
        store.add(std::span<const float>(vec));
    }

    const BinaryCode query_code = random_code();
    std::vector<double> query_vec(options.code_bits);
    for (auto& v : query_vec) {
        v = rng.normal();
    }
    const std::size_t k = std::max<std::size_t>(1, std::min<std::uint64_t>(options.k, options.count));

    using clock = std::chrono::steady_clock;
    auto run_hamming = [&] { return topk_hamming(db, query_code, k, options.scan); };
    auto run_cosine = [&] {
        std::vector<ScoredHit> hits;
        for (std::uint64_t offset = 0; offset < options.count; offset += resident) {
            const auto rows = static_cast<std::size_t>(std::min(resident, options.count - offset));
            auto part = scan_cosine(store, query_vec, rows, k, options.scan, offset);
            hits.insert(hits.end(), part.begin(), part.end());
        }
        return merge_topk(std::move(hits), k);
    };

    // One untimed pass each pages the database in and warms the caches.
    run_hamming();
    run_cosine();
    std::vector<double> ham_times;
    std::vector<double> cos_times;
    for (std::size_t r = 0; r < options.repetitions; ++r) {
        auto t0 = clock::now();
        auto h = run_hamming();
        auto t1 = clock::now();
        auto c = run_cosine();
        auto t2 = clock::now();
        if (h.size() != k || c.size() != k) {
            fail(ErrorType::kInvalidInput, "benchmark scan returned a short result");
        }
        ham_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        cos_times.push_back(std::chrono::duration<double>(t2 - t1).count());
    }
    report.hamming_seconds = median(ham_times);
    report.cosine_seconds = median(cos_times);
    report.speedup = report.cosine_seconds / report.hamming_seconds;
    report.timed = true;
    return report;
}

std::string bench_report_json(const BenchReport& r) {
    nlohmann::ordered_json j;
    j["count"] = r.count;
    j["code_bits"] = r.code_bits;
    j["code_payload_bytes"] = r.code_payload_bytes;
    j["real_payload_bytes"] = r.real_payload_bytes;
    j["database_file_bytes"] = r.database_file_bytes;
    j["compression_ratio"] = r.compression_ratio;
    j["timed"] = r.timed;
    j["repetitions"] = r.repetitions;
    j["hamming_seconds"] = r.hamming_seconds;
    j["cosine_seconds"] = r.cosine_seconds;
    j["speedup"] = r.speedup;
    j["real_resident_records"] = r.real_resident_records;
    return j.dump(2);
}

}  // namespace hashscreen
