// Copyright 2026 The semood Authors.
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

#ifndef SEMOOD_ERROR_HPP
#define SEMOOD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace semood {

/// Coarse error classes. They map one-to-one onto the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kShapeMismatch = 2,
  kNumeric = 3,
  kIo = 4,
  kFormat = 5,
  kState = 6,
  kMissingComponent = 7,  // a model file lacks the requested part
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace semood

#endif  // SEMOOD_ERROR_HPP
