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

#include "wavc/io/wav_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "wavc/common/error.h"

namespace wavc {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

std::uint32_t U32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t U16(const unsigned char *p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

struct ParsedWav {
  WavInfo info;
  std::vector<unsigned char> data;
};

ParsedWav Parse(const std::filesystem::path &path, bool want_data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file " + path.string());
  std::array<unsigned char, 12> riff{};
  in.read(reinterpret_cast<char *>(riff.data()), riff.size());
  if (!in || std::memcmp(riff.data(), "RIFF", 4) != 0 || std::memcmp(riff.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path.string());

  ParsedWav out;
  bool have_fmt = false;
  for (;;) {
    std::array<unsigned char, 8> hdr{};
    in.read(reinterpret_cast<char *>(hdr.data()), hdr.size());
    if (!in) break;
    std::uint32_t size = U32(hdr.data() + 4);
    if (std::memcmp(hdr.data(), "fmt ", 4) == 0) {
      std::vector<unsigned char> fmt(size);
      in.read(reinterpret_cast<char *>(fmt.data()), size);
      if (!in || size < 16) throw IoError("truncated fmt chunk in " + path.string());
      std::uint16_t format = U16(fmt.data());
      if (format == 0xFFFE && size >= 26) format = U16(fmt.data() + 24);  // extensible
      out.info.channels = U16(fmt.data() + 2);
      out.info.sample_rate = static_cast<int>(U32(fmt.data() + 4));
      out.info.bits_per_sample = U16(fmt.data() + 14);
      if (format == 3) {
        out.info.is_float = true;
      } else if (format != 1) {
        throw IoError("unsupported WAV encoding " + std::to_string(format) + " in " + path.string());
      }
      have_fmt = true;
    } else if (std::memcmp(hdr.data(), "data", 4) == 0) {
      if (!have_fmt) throw IoError("data chunk before fmt chunk in " + path.string());
      if (!want_data) return out;
      out.data.resize(size);
      in.read(reinterpret_cast<char *>(out.data.data()), size);
      out.data.resize(static_cast<std::size_t>(in.gcount()));
      return out;
    } else {
      in.seekg(size + (size & 1u), std::ios::cur);
    }
    if (size & 1u && std::memcmp(hdr.data(), "fmt ", 4) == 0) in.seekg(1, std::ios::cur);
  }
  if (!have_fmt) throw IoError("missing fmt chunk in " + path.string());
  if (want_data) throw IoError("missing data chunk in " + path.string());
  return out;
}

}  // namespace

WavInfo ReadWavInfo(const std::filesystem::path &path) { return Parse(path, false).info; }

Waveform ReadWav(const std::filesystem::path &path) {
  ParsedWav wav = Parse(path, true);
  const WavInfo &info = wav.info;
  if (info.channels != 1)
    throw IoError(path.string() + ": expected mono audio, got " + std::to_string(info.channels) + " channels");
  const int bytes = info.bits_per_sample / 8;
  if (!(info.is_float ? bytes == 4 : (bytes == 2 || bytes == 3 || bytes == 4)))
    throw IoError(path.string() + ": unsupported bit depth " + std::to_string(info.bits_per_sample));

  Waveform wave;
  wave.sample_rate = info.sample_rate;
  const std::size_t n = wav.data.size() / bytes;
  wave.samples.resize(n);
  const unsigned char *p = wav.data.data();
  for (std::size_t i = 0; i < n; ++i, p += bytes) {
    if (info.is_float) {
      float v;
      std::memcpy(&v, p, 4);
      wave.samples[i] = v;
    } else if (bytes == 2) {
      wave.samples[i] = static_cast<std::int16_t>(U16(p)) / 32768.0;
    } else if (bytes == 3) {
      std::int32_t v = (p[0] << 8) | (p[1] << 16) | (static_cast<std::int32_t>(p[2]) << 24);
      wave.samples[i] = (v >> 8) / 8388608.0;
    } else {
      wave.samples[i] = static_cast<std::int32_t>(U32(p)) / 2147483648.0;
    }
  }
  return wave;
}

void WriteWav(const std::filesystem::path &path, const Waveform &wave) {
  if (wave.sample_rate <= 0) throw InvalidArgument("WriteWav: sample_rate must be positive");
  std::vector<unsigned char> buf(44 + 2 * wave.samples.size());
  auto put32 = [&](std::size_t at, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf[at + b] = static_cast<unsigned char>(v >> (8 * b));
  };
  auto put16 = [&](std::size_t at, std::uint16_t v) {
    buf[at] = static_cast<unsigned char>(v);
    buf[at + 1] = static_cast<unsigned char>(v >> 8);
  };
  const auto data_bytes = static_cast<std::uint32_t>(2 * wave.samples.size());
  std::memcpy(buf.data(), "RIFF", 4);
  put32(4, 36 + data_bytes);
  std::memcpy(buf.data() + 8, "WAVEfmt ", 8);
  put32(16, 16);
  put16(20, 1);
  put16(22, 1);
  put32(24, static_cast<std::uint32_t>(wave.sample_rate));
  put32(28, static_cast<std::uint32_t>(wave.sample_rate * 2));
  put16(32, 2);
  put16(34, 16);
  std::memcpy(buf.data() + 36, "data", 4);
  put32(40, data_bytes);
  for (std::size_t i = 0; i < wave.samples.size(); ++i) {
    const long v = std::clamp(std::lround(wave.samples[i] * 32768.0), -32768L, 32767L);
    put16(44 + 2 * i, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wavc
