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

#include <stdexcept>
#include <string>
#include <string_view>

namespace hashscreen {

enum class ErrorType {
    kInvalidInput,
    kDegenerateInput,
    kUndefinedMetric,
    kShapeMismatch,
    kParse,
    kNotFound,
    kCorruptDatabase,
    kTrainingDiverged,
    kIo,
};

std::string_view to_string(ErrorType type);

/// Every failure raised by the library carries one of the categories above.
/// The C API maps them one-to-one onto status codes.
class Error : public std::runtime_error {
 public:
    Error(ErrorType type, const std::string& message)
        : std::runtime_error(message), type_(type) {}

    ErrorType type() const noexcept { return type_; }

 private:
    ErrorType type_;
};

[[noreturn]] inline void fail(ErrorType type, const std::string& message) {
    throw Error(type, message);
}

}  // namespace hashscreen
