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
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <type_traits>

namespace hashscreen::io {

// All on-disk integers and floats are little-endian regardless of host.

template <class T>
T to_little_endian(T value) {
    static_assert(std::is_integral_v<T>);
    if constexpr (std::endian::native == std::endian::big) {
        T out{};
        auto* src = reinterpret_cast<const unsigned char*>(&value);
        auto* dst = reinterpret_cast<unsigned char*>(&out);
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            dst[i] = src[sizeof(T) - 1 - i];
        }
        return out;
    } else {
        return value;
    }
}

template <class T>
void put(std::ostream& out, T value) {
    static_assert(std::is_integral_v<T>);
    value = to_little_endian(value);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

inline void put_f64(std::ostream& out, double value) {
    put(out, std::bit_cast<std::uint64_t>(value));
}

/// Returns false on short read.
template <class T>
bool get(std::istream& in, T& value) {
    static_assert(std::is_integral_v<T>);
    T raw{};
    if (!in.read(reinterpret_cast<char*>(&raw), sizeof(T))) {
        return false;
    }
    value = to_little_endian(raw);
    return true;
}

inline bool get_f64(std::istream& in, double& value) {
    std::uint64_t bits = 0;
    if (!get(in, bits)) {
        return false;
    }
    value = std::bit_cast<double>(bits);
    return true;
}

/// Loads a little-endian word from possibly unaligned memory.
inline std::uint64_t load_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    std::memcpy(&v, p, sizeof(v));
    return to_little_endian(v);
}

}  // namespace hashscreen::io
