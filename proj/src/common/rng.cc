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

#include "wavc/common/rng.h"

#include <sstream>

#include "wavc/common/error.h"

namespace wavc {

std::uint64_t Rng::UniformIndex(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::UniformIndex: n must be positive");
  // Reject the low tail so that every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::string Rng::Serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::Restore(const std::string &state) {
  std::istringstream is(state);
  is >> engine_;
  if (is.fail()) throw IoError("Rng::Restore: malformed engine state");
}

}  // namespace wavc
