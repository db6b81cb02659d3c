// slukit/wav.hpp
//
// Copyright 2026 The slukit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Minimal RIFF/WAVE support: 16-bit PCM mono in and out, plus a lenient
// header-only probe for durations. No compressed formats, no resampling.

#ifndef SLUKIT_WAV_HPP
#define SLUKIT_WAV_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "slukit/common.hpp"

namespace slukit {

// Mono audio, samples in [-1.0, 1.0).
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  bool operator==(const AudioClip&) const = default;
};

struct WavInfo {
  std::uint16_t audio_format = 0;  // 1 == integer PCM
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint64_t frame_count = 0;

  double duration_seconds() const {
    return sample_rate == 0 ? 0.0
                            : static_cast<double>(frame_count) / sample_rate;
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

struct WavFile {
  WavInfo info;
  std::vector<unsigned char> data;  // raw "data" chunk bytes
};

inline WavFile parse_wav(const std::filesystem::path& path, bool want_data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise("cannot open WAV file: ", path.string());

  unsigned char riff[12];
  if (!in.read(reinterpret_cast<char*>(riff), 12)) {
    raise(path.string(), ": truncated header (no RIFF chunk)");
  }
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0) {
    raise(path.string(), ": not a RIFF/WAVE file");
  }

  WavFile wav;
  bool have_fmt = false;
  bool have_data = false;
  unsigned char chunk_header[8];
  while (in.read(reinterpret_cast<char*>(chunk_header), 8)) {
    const std::uint32_t chunk_size = read_u32le(chunk_header + 4);
    if (std::memcmp(chunk_header, "fmt ", 4) == 0) {
      if (chunk_size < 16) raise(path.string(), ": fmt chunk too small");
      std::vector<unsigned char> fmt(chunk_size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), chunk_size)) {
        raise(path.string(), ": truncated fmt chunk");
      }
      wav.info.audio_format = read_u16le(fmt.data());
      wav.info.channels = read_u16le(fmt.data() + 2);
      wav.info.sample_rate = read_u32le(fmt.data() + 4);
      wav.info.bits_per_sample = read_u16le(fmt.data() + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_header, "data", 4) == 0) {
      if (!have_fmt) raise(path.string(), ": data chunk before fmt chunk");
      if (want_data) {
        wav.data.resize(chunk_size);
        if (!in.read(reinterpret_cast<char*>(wav.data.data()), chunk_size)) {
          raise(path.string(), ": data chunk shorter than declared (",
                chunk_size, " bytes expected)");
        }
      } else {
        in.seekg(chunk_size, std::ios::cur);
      }
      const std::uint32_t block_align =
          wav.info.channels * (wav.info.bits_per_sample / 8);
      wav.info.frame_count = block_align == 0 ? 0 : chunk_size / block_align;
      have_data = true;
      break;
    } else {
      // Skip unknown chunks (LIST, fact, ...); chunks are word aligned.
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
    if (!in) raise(path.string(), ": truncated header");
  }
  if (!have_fmt || !have_data) {
    raise(path.string(), ": truncated header (missing ",
          have_fmt ? "data" : "fmt", " chunk)");
  }
  return wav;
}

}  // namespace detail

// Header-only probe; accepts any PCM layout. Used for corpus durations.
inline WavInfo read_wav_info(const std::filesystem::path& path) {
  return detail::parse_wav(path, /*want_data=*/false).info;
}

// Strict reader: 16-bit integer PCM, mono. Samples are scaled by 1/32768.
inline AudioClip read_wav(const std::filesystem::path& path) {
  detail::WavFile wav = detail::parse_wav(path, /*want_data=*/true);
  if (wav.info.audio_format != 1) {
    raise(path.string(), ": audio format ", wav.info.audio_format,
          " is not integer PCM");
  }
  if (wav.info.channels != 1) {
    raise(path.string(), ": has ", wav.info.channels,
          " channels, mono required");
  }
  if (wav.info.bits_per_sample != 16) {
    raise(path.string(), ": ", wav.info.bits_per_sample,
          " bits per sample, 16 required");
  }
  AudioClip clip;
  clip.sample_rate = static_cast<int>(wav.info.sample_rate);
  clip.samples.resize(wav.info.frame_count);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const auto raw = static_cast<std::int16_t>(
        detail::read_u16le(wav.data.data() + 2 * i));
    clip.samples[i] = raw / 32768.0;
  }
  return clip;
}

// Saturating 16-bit quantization; the exact inverse of read_wav up to one
// quantization step (1/32768) per sample.
inline void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32le(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put_u32le(out, 16);
  detail::put_u16le(out, 1);  // PCM
  detail::put_u16le(out, 1);  // mono
  detail::put_u32le(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32le(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  detail::put_u16le(out, 2);   // block align
  detail::put_u16le(out, 16);  // bits per sample
  out += "data";
  detail::put_u32le(out, data_bytes);
  for (double s : clip.samples) {
    long q = std::lround(s * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    detail::put_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise("cannot open for writing: ", path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) raise("write failed: ", path.string());
}

}  // namespace slukit

#endif  // SLUKIT_WAV_HPP
