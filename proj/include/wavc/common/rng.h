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

#ifndef WAVC_COMMON_RNG_H_
#define WAVC_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace wavc {

/// Seeded random source whose draws are identical across standard libraries.
/// std::mt19937_64's output sequence is fixed by the standard, but the
/// std::*_distribution adaptors are not, so index and real draws are derived
/// here directly from the raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t UniformIndex(std::uint64_t n);
  /// Uniform real in [0, 1) with 53 random bits.
  double Uniform();

  /// Fisher-Yates shuffle driven by UniformIndex.
  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(UniformIndex(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Engine state as text; Restore(Serialize()) resumes the exact sequence.
  std::string Serialize() const;
  void Restore(const std::string &state);

  bool operator==(const Rng &other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wavc

#endif  // WAVC_COMMON_RNG_H_
