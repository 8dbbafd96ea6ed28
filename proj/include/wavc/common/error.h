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

#ifndef WAVC_COMMON_ERROR_H_
#define WAVC_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace wavc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated shape or dimension contract between tensors/matrices.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on argument values (not shapes) does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Vocoder analysis/synthesis failure. Carries the utterance id when known.
class AnalysisError : public Error {
 public:
  AnalysisError(const std::string &utt_id, const std::string &what)
      : Error(utt_id.empty() ? what : utt_id + ": " + what), utt_id_(utt_id) {}
  const std::string &utt_id() const { return utt_id_; }

 private:
  std::string utt_id_;
};

/// File-format and I/O problems (WAV, feature cache, manifest, checkpoint).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown configuration keys and values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Training aborted, e.g. on a non-finite loss component.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavc

#endif  // WAVC_COMMON_ERROR_H_
