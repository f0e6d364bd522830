// Copyright 2026 The sparity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPARITY_ERROR_HPP_
#define SPARITY_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sparity {

// Mirrors sp_status in the C API; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kScaleGuard = 2,
  kConfig = 3,
  kIo = 4,
  kInfeasible = 5,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool condition, const std::string& what) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace sparity

#endif  // SPARITY_ERROR_HPP_
