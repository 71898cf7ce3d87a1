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

#include "hashscreen/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hashscreen {

std::size_t default_thread_count() {
    if (const char* env = std::getenv("HASHSCREEN_THREADS")) {
        std::size_t value = 0;
        const char* end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc() && ptr == end && value > 0) {
            return value;
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_ranges(std::size_t count, std::size_t parts, std::size_t threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    parts = std::max<std::size_t>(1, parts);
    threads = std::clamp<std::size_t>(threads, 1, parts);
    auto range_of = [&](std::size_t p) {
        return std::pair{count * p / parts, count * (p + 1) / parts};
    };
    if (threads == 1) {
        for (std::size_t p = 0; p < parts; ++p) {
            auto [b, e] = range_of(p);
            fn(p, b, e);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t p = next++; p < parts; p = next++) {
                try {
                    auto [b, e] = range_of(p);
                    fn(p, b, e);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace hashscreen
