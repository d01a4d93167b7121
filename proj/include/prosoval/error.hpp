// Copyright 2026 The Prosoval Authors.
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

#ifndef PROSOVAL_ERROR_HPP
#define PROSOVAL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace prosoval {

// Every error raised by the library falls into one of these categories.
// The CLI maps them to exit codes: io=2, format=3, validation=4,
// configuration=5. contract marks caller bugs (violated preconditions)
// and maps to the generic failure code 1.
enum class ErrorCategory {
  io,
  format,
  validation,
  configuration,
  contract,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

inline int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::io: return 2;
    case ErrorCategory::format: return 3;
    case ErrorCategory::validation: return 4;
    case ErrorCategory::configuration: return 5;
    case ErrorCategory::contract: return 1;
  }
  return 1;
}

inline std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::io: return "io";
    case ErrorCategory::format: return "format";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::configuration: return "configuration";
    case ErrorCategory::contract: return "contract";
  }
  return "contract";
}

[[noreturn]] inline void raise(ErrorCategory c, const std::string& message) {
  throw Error(c, message);
}

}  // namespace prosoval

#endif  // PROSOVAL_ERROR_HPP
