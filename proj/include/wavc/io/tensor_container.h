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

#ifndef WAVC_IO_TENSOR_CONTAINER_H_
#define WAVC_IO_TENSOR_CONTAINER_H_

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wavc/common/error.h"

namespace wavc {

enum class DType { kF32, kF64, kI64 };

const char *DTypeName(DType dtype);
std::size_t DTypeSize(DType dtype);

template <typename T>
constexpr DType DTypeOf();
template <>
constexpr DType DTypeOf<float>() { return DType::kF32; }
template <>
constexpr DType DTypeOf<double>() { return DType::kF64; }
template <>
constexpr DType DTypeOf<std::int64_t>() { return DType::kI64; }

struct NamedArray {
  DType dtype = DType::kF32;
  std::vector<std::int64_t> shape;
  std::vector<std::byte> bytes;

  std::int64_t numel() const;
};

/// A file of named, typed, shaped arrays plus string metadata.
///
/// On-disk layout (the safetensors layout, little-endian):
///   u64 header_len | header_len bytes of JSON | raw array bytes
/// The JSON maps each array name to {"dtype","shape","data_offsets"} and the
/// reserved key "__metadata__" to a string->string object. Arrays are stored
/// in name order; the header is space-padded to a multiple of 8 bytes.
class TensorContainer {
 public:
  template <typename T>
  void Put(const std::string &name, std::span<const T> values, std::vector<std::int64_t> shape) {
    NamedArray a;
    a.dtype = DTypeOf<T>();
    a.shape = std::move(shape);
    if (a.numel() != static_cast<std::int64_t>(values.size()))
      throw ShapeError("TensorContainer::Put(" + name + "): shape does not match value count");
    a.bytes.resize(values.size_bytes());
    if (!values.empty()) std::memcpy(a.bytes.data(), values.data(), values.size_bytes());
    arrays_[name] = std::move(a);
  }

  /// Returns the values of `name`; throws IoError when missing or the stored
  /// dtype differs from T.
  template <typename T>
  std::vector<T> Get(const std::string &name, std::vector<std::int64_t> *shape = nullptr) const {
    const NamedArray &a = At(name);
    if (a.dtype != DTypeOf<T>())
      throw IoError("TensorContainer::Get(" + name + "): stored dtype is " + DTypeName(a.dtype));
    std::vector<T> out(static_cast<std::size_t>(a.numel()));
    if (!out.empty()) std::memcpy(out.data(), a.bytes.data(), a.bytes.size());
    if (shape) *shape = a.shape;
    return out;
  }

  const NamedArray &At(const std::string &name) const;
  bool Has(const std::string &name) const { return arrays_.count(name) > 0; }
  std::vector<std::string> Names() const;
  const std::map<std::string, NamedArray> &arrays() const { return arrays_; }

  std::map<std::string, std::string> &metadata() { return metadata_; }
  const std::map<std::string, std::string> &metadata() const { return metadata_; }
  /// Metadata lookup that throws IoError when absent.
  const std::string &Meta(const std::string &key) const;

  std::vector<std::byte> Serialize() const;
  static TensorContainer Deserialize(std::span<const std::byte> bytes);

  /// Write to `path` via a temporary file and rename, so readers never see a
  /// partially written container.
  void Save(const std::filesystem::path &path) const;
  static TensorContainer Load(const std::filesystem::path &path);

  bool operator==(const TensorContainer &other) const;

 private:
  std::map<std::string, NamedArray> arrays_;
  std::map<std::string, std::string> metadata_;
};

/// Writes `bytes` to `path` atomically (temp file in the same directory, then rename).
void AtomicWriteFile(const std::filesystem::path &path, std::span<const std::byte> bytes);
std::vector<std::byte> ReadFileBytes(const std::filesystem::path &path);

}  // namespace wavc

#endif  // WAVC_IO_TENSOR_CONTAINER_H_
