// Copyright 2026 The hybridse Authors
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

#ifndef HYBRIDSE_SIGNAL_WAV_IO_HPP_
#define HYBRIDSE_SIGNAL_WAV_IO_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse {

enum class WavSampleFormat { kPcm16, kFloat32, kFloat64 };

namespace detail {

inline std::uint32_t read_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_le32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}
inline void put_le16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
inline std::uint64_t read_le64(const unsigned char* p) {
  return static_cast<std::uint64_t>(read_le32(p)) | (static_cast<std::uint64_t>(read_le32(p + 4)) << 32);
}
inline void put_le64(std::vector<unsigned char>& out, std::uint64_t v) {
  put_le32(out, static_cast<std::uint32_t>(v & 0xFFFFFFFFULL));
  put_le32(out, static_cast<std::uint32_t>(v >> 32));
}
inline void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace detail

// Parses an in-memory RIFF/WAVE image. Accepts mono PCM16, float32 or
// float64 (including WAVE_FORMAT_EXTENSIBLE wrappers of either); everything else is
// a FormatError.
inline Waveform parse_wav(const std::vector<unsigned char>& bytes, const std::string& name = "<memory>") {
  auto fail = [&](const std::string& why) { throw FormatError(name + ": " + why); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = detail::read_le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Truncated trailing data chunks are common; clamp the data chunk only.
      if (std::memcmp(chunk, "data", 4) != 0) fail("truncated chunk");
    }
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) fail("fmt chunk too short");
      const unsigned char* f = bytes.data() + body;
      format = detail::read_le16(f);
      channels = detail::read_le16(f + 2);
      rate = detail::read_le32(f + 4);
      bits = detail::read_le16(f + 14);
      if (format == detail::kFormatExtensible) {
        if (avail < 26) fail("extensible fmt chunk too short");
        format = detail::read_le16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) fail("missing fmt chunk");
  if (data == nullptr) fail("missing data chunk");
  if (channels != 1) {
    fail("multi-channel input is not supported (" + std::to_string(channels) + " channels)");
  }
  std::vector<double> samples;
  if (format == detail::kFormatPcm && bits == 16) {
    samples.resize(data_size / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto v = static_cast<std::int16_t>(detail::read_le16(data + 2 * i));
      samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == detail::kFormatFloat && bits == 32) {
    samples.resize(data_size / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = static_cast<double>(std::bit_cast<float>(detail::read_le32(data + 4 * i)));
    }
  } else if (format == detail::kFormatFloat && bits == 64) {
    samples.resize(data_size / 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = std::bit_cast<double>(detail::read_le64(data + 8 * i));
    }
  } else {
    fail("unsupported sample format (format tag " + std::to_string(format) + ", " +
         std::to_string(bits) + " bits)");
  }
  if (!is_supported_rate(static_cast<int>(rate))) {
    throw ConfigError(name + ": unsupported sample rate " + std::to_string(rate) + " Hz");
  }
  if (samples.empty()) fail("no samples");
  return Waveform(std::move(samples), static_cast<int>(rate));
}

inline std::vector<unsigned char> encode_wav(const Waveform& wave, WavSampleFormat fmt) {
  const bool pcm = fmt == WavSampleFormat::kPcm16;
  const std::uint16_t bits = pcm ? 16 : (fmt == WavSampleFormat::kFloat32 ? 32 : 64);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.size() * (bits / 8));
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  detail::put_tag(out, "RIFF");
  detail::put_le32(out, 36 + data_bytes);
  detail::put_tag(out, "WAVE");
  detail::put_tag(out, "fmt ");
  detail::put_le32(out, 16);
  detail::put_le16(out, pcm ? detail::kFormatPcm : detail::kFormatFloat);
  detail::put_le16(out, 1);
  detail::put_le32(out, static_cast<std::uint32_t>(wave.sample_rate_hz()));
  detail::put_le32(out, static_cast<std::uint32_t>(wave.sample_rate_hz()) * (bits / 8));
  detail::put_le16(out, bits / 8);
  detail::put_le16(out, bits);
  detail::put_tag(out, "data");
  detail::put_le32(out, data_bytes);
  for (double v : wave.samples()) {
    if (pcm) {
      const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      detail::put_le16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else if (bits == 32) {
      detail::put_le32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      detail::put_le64(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  return out;
}

inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_wav(bytes, path);
}

inline void write_wav(const std::string& path, const Waveform& wave,
                      WavSampleFormat fmt = WavSampleFormat::kFloat32) {
  const auto bytes = encode_wav(wave, fmt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace hybridse

#endif  // HYBRIDSE_SIGNAL_WAV_IO_HPP_
