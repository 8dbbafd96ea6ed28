// Copyright 2026 The wavc Authors. All Rights Reserved.
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

#include "wavc/common/log.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace wavc {
namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::kInfo)};
std::atomic<int> g_warnings{0};
std::mutex g_sink_mutex;

const char *LevelTag(LogLevel level) {
  switch (level) {
    case LogLevel::kDebug: return "DEBUG";
    case LogLevel::kInfo: return "INFO";
    case LogLevel::kWarning: return "WARNING";
    case LogLevel::kError: return "ERROR";
    default: return "";
  }
}

}  // namespace

void SetLogLevel(LogLevel level) { g_level = static_cast<int>(level); }
LogLevel GetLogLevel() { return static_cast<LogLevel>(g_level.load()); }
int WarningCount() { return g_warnings.load(); }
void ResetWarningCount() { g_warnings = 0; }

namespace internal {

LogMessage::~LogMessage() {
  if (level_ == LogLevel::kWarning) ++g_warnings;
  if (static_cast<int>(level_) < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_sink_mutex);
  std::cerr << LevelTag(level_) << " (" << func_ << ") " << stream_.str() << '\n';
}

}  // namespace internal
}  // namespace wavc
