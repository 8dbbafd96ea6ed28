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

#ifndef WAVC_COMMON_LOG_H_
#define WAVC_COMMON_LOG_H_

#include <sstream>
#include <string>

namespace wavc {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kSilent = 4 };

void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();

/// Number of warnings emitted since start (or the last reset). Tests use it
/// to observe "no-op with warning" contracts.
int WarningCount();
void ResetWarningCount();

namespace internal {

class LogMessage {
 public:
  LogMessage(LogLevel level, const char *func) : level_(level), func_(func) {}
  ~LogMessage();
  LogMessage(const LogMessage &) = delete;
  LogMessage &operator=(const LogMessage &) = delete;

  template <typename T>
  LogMessage &operator<<(const T &value) {
    stream_ << value;
    return *this;
  }

 private:
  LogLevel level_;
  const char *func_;
  std::ostringstream stream_;
};

}  // namespace internal
}  // namespace wavc

#define WAVC_LOG(level) ::wavc::internal::LogMessage(level, __func__)
#define WAVC_INFO WAVC_LOG(::wavc::LogLevel::kInfo)
#define WAVC_WARN WAVC_LOG(::wavc::LogLevel::kWarning)
#define WAVC_ERR WAVC_LOG(::wavc::LogLevel::kError)

#endif  // WAVC_COMMON_LOG_H_
