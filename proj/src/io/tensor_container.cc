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

#include "wavc/io/tensor_container.h"

#include <bit>
#include <fstream>

#include <json.hpp>

namespace wavc {

static_assert(std::endian::native == std::endian::little,
              "tensor containers are stored little-endian");

const char *DTypeName(DType dtype) {
  switch (dtype) {
    case DType::kF32: return "F32";
    case DType::kF64: return "F64";
    case DType::kI64: return "I64";
  }
  return "?";
}

std::size_t DTypeSize(DType dtype) { return dtype == DType::kF32 ? 4 : 8; }

namespace {

DType ParseDType(const std::string &name) {
  if (name == "F32") return DType::kF32;
  if (name == "F64") return DType::kF64;
  if (name == "I64") return DType::kI64;
  throw IoError("unsupported dtype in container: " + name);
}

}  // namespace

std::int64_t NamedArray::numel() const {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

const NamedArray &TensorContainer::At(const std::string &name) const {
  auto it = arrays_.find(name);
  if (it == arrays_.end()) throw IoError("container has no array named '" + name + "'");
  return it->second;
}

std::vector<std::string> TensorContainer::Names() const {
  std::vector<std::string> names;
  for (const auto &[name, _] : arrays_) names.push_back(name);
  return names;
}

const std::string &TensorContainer::Meta(const std::string &key) const {
  auto it = metadata_.find(key);
  if (it == metadata_.end()) throw IoError("container metadata has no key '" + key + "'");
  return it->second;
}

std::vector<std::byte> TensorContainer::Serialize() const {
  nlohmann::ordered_json header = nlohmann::ordered_json::object();
  if (!metadata_.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto &[k, v] : metadata_) meta[k] = v;
    header["__metadata__"] = meta;
  }
  std::size_t offset = 0;
  for (const auto &[name, a] : arrays_) {
    header[name] = {{"dtype", DTypeName(a.dtype)},
                    {"shape", a.shape},
                    {"data_offsets", {offset, offset + a.bytes.size()}}};
    offset += a.bytes.size();
  }
  std::string text = header.dump();
  while (text.size() % 8 != 0) text.push_back(' ');

  std::vector<std::byte> out(8 + text.size() + offset);
  const std::uint64_t len = text.size();
  std::memcpy(out.data(), &len, 8);
  std::memcpy(out.data() + 8, text.data(), text.size());
  std::byte *cursor = out.data() + 8 + text.size();
  for (const auto &[_, a] : arrays_) {
    if (!a.bytes.empty()) std::memcpy(cursor, a.bytes.data(), a.bytes.size());
    cursor += a.bytes.size();
  }
  return out;
}

TensorContainer TensorContainer::Deserialize(std::span<const std::byte> bytes) {
  if (bytes.size() < 8) throw IoError("container truncated (no header length)");
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data(), 8);
  if (len > bytes.size() - 8) throw IoError("container truncated (header)");
  std::string text(reinterpret_cast<const char *>(bytes.data() + 8), len);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("container header is not valid JSON: ") + e.what());
  }
  const std::byte *data = bytes.data() + 8 + len;
  const std::size_t data_size = bytes.size() - 8 - len;

  TensorContainer c;
  for (const auto &[key, value] : header.items()) {
    if (key == "__metadata__") {
      for (const auto &[mk, mv] : value.items()) c.metadata_[mk] = mv.get<std::string>();
      continue;
    }
    NamedArray a;
    a.dtype = ParseDType(value.at("dtype").get<std::string>());
    a.shape = value.at("shape").get<std::vector<std::int64_t>>();
    auto offsets = value.at("data_offsets").get<std::vector<std::size_t>>();
    if (offsets.size() != 2 || offsets[0] > offsets[1] || offsets[1] > data_size)
      throw IoError("container array '" + key + "' has invalid data offsets");
    if (offsets[1] - offsets[0] != static_cast<std::size_t>(a.numel()) * DTypeSize(a.dtype))
      throw IoError("container array '" + key + "' size does not match its shape");
    a.bytes.assign(data + offsets[0], data + offsets[1]);
    c.arrays_[key] = std::move(a);
  }
  return c;
}

void TensorContainer::Save(const std::filesystem::path &path) const {
  AtomicWriteFile(path, Serialize());
}

TensorContainer TensorContainer::Load(const std::filesystem::path &path) {
  try {
    return Deserialize(ReadFileBytes(path));
  } catch (const IoError &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

bool TensorContainer::operator==(const TensorContainer &other) const {
  if (metadata_ != other.metadata_ || arrays_.size() != other.arrays_.size()) return false;
  for (const auto &[name, a] : arrays_) {
    auto it = other.arrays_.find(name);
    if (it == other.arrays_.end()) return false;
    const NamedArray &b = it->second;
    if (a.dtype != b.dtype || a.shape != b.shape || a.bytes != b.bytes) return false;
  }
  return true;
}

void AtomicWriteFile(const std::filesystem::path &path, std::span<const std::byte> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::byte> ReadFileBytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<std::byte> bytes(size);
  in.seekg(0);
  in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw IoError("short read from " + path.string());
  return bytes;
}

}  // namespace wavc
