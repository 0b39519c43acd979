/**
 * Copyright (c) 2026 The tracerec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace tracerec {

/// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,  // caller broke a precondition
  kConfig,           // malformed experiment configuration
  kInfeasible,       // brute-force cap or integer trace-count overflow
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  explicit Error(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool ok, const char* what,
                    ErrorKind kind = ErrorKind::kInvalidArgument) {
  if (!ok) throw Error(kind, what);
}

}  // namespace detail
}  // namespace tracerec
