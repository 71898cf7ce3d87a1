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
#include <functional>

namespace hashscreen {

/// Worker count for scans and batch encoding: HASHSCREEN_THREADS if set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Splits [0, count) into `parts` contiguous ranges and runs
/// fn(part, begin, end) for each on up to `threads` workers. Part p always
/// covers the same range regardless of the thread count.
void parallel_ranges(std::size_t count, std::size_t parts, std::size_t threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace hashscreen
