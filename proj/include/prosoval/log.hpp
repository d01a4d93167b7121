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

#ifndef PROSOVAL_LOG_HPP
#define PROSOVAL_LOG_HPP

namespace prosoval::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Active level comes from the PROSOVAL_LOG environment variable
// (error|warn|info|debug); default is warn.
Level active_level();

void message(Level level, const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 2, 3)))
#endif
    ;

#define PROSOVAL_LOG_FN(name, lvl)                           \
  template <typename... Args>                                \
  void name(const char* fmt, Args... args) {                 \
    message(lvl, fmt, args...);                              \
  }

PROSOVAL_LOG_FN(error, Level::error)
PROSOVAL_LOG_FN(warn, Level::warn)
PROSOVAL_LOG_FN(info, Level::info)
PROSOVAL_LOG_FN(debug, Level::debug)

#undef PROSOVAL_LOG_FN

}  // namespace prosoval::log

#endif  // PROSOVAL_LOG_HPP
