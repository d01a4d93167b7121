// Copyright 2026 The Prosoval Authors.
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

#include "prosoval/signal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "prosoval/error.hpp"

namespace prosoval {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ofstream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCategory::io, "cannot open wav file: " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string name = path.string();

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    raise(ErrorCategory::format, "not a RIFF/WAVE file: " + name);
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + chunk_len > bytes.size()) {
      raise(ErrorCategory::format, "truncated chunk in wav file: " + name);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) {
        raise(ErrorCategory::format, "fmt chunk too short in: " + name);
      }
      const unsigned char* p = bytes.data() + pos;
      fmt.format = read_u16(p);
      fmt.channels = read_u16(p + 2);
      fmt.sample_rate = read_u32(p + 4);
      fmt.bits_per_sample = read_u16(p + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_len = chunk_len;
      break;
    }
    pos += chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    raise(ErrorCategory::format, "missing fmt/data chunk in: " + name);
  }
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    raise(ErrorCategory::format, "invalid fmt chunk in: " + name);
  }

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits_per_sample == 16;
  const bool float32 = fmt.format == kFormatIeeeFloat && fmt.bits_per_sample == 32;
  if (!pcm16 && !float32) {
    raise(ErrorCategory::format,
          "unsupported wav codec (format=" + std::to_string(fmt.format) +
              ", bits=" + std::to_string(fmt.bits_per_sample) + ") in: " + name);
  }

  const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data_len < frame_bytes) {
    raise(ErrorCategory::format, "empty signal in wav file: " + name);
  }
  const std::size_t n_frames = data_len / frame_bytes;

  Waveform w;
  w.sample_rate_hz = static_cast<int>(fmt.sample_rate);
  w.samples.resize(n_frames);

  for (std::size_t t = 0; t < n_frames; ++t) {
    const unsigned char* p = data + t * frame_bytes;
    double acc = 0.0;
    for (std::uint16_t c = 0; c < fmt.channels; ++c) {
      if (pcm16) {
        const std::uint16_t raw = read_u16(p + c * 2);
        acc += static_cast<std::int16_t>(raw) / 32768.0;
      } else {
        const std::uint32_t raw = read_u32(p + c * 4);
        acc += std::bit_cast<float>(raw);
      }
    }
    double v = acc / fmt.channels;
    if (!std::isfinite(v)) {
      raise(ErrorCategory::format, "non-finite sample in wav file: " + name);
    }
    w.samples[t] = std::clamp(v, -1.0, 1.0);
  }
  return w;
}

void save_wav_float32(const Waveform& w, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(ErrorCategory::io, "cannot write wav file: " + path.string());
  }
  const std::uint32_t data_len = static_cast<std::uint32_t>(w.samples.size() * 4);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, kFormatIeeeFloat);
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 4);  // byte rate
  write_u16(out, 4);                                                 // block align
  write_u16(out, 32);
  out.write("data", 4);
  write_u32(out, data_len);
  for (double s : w.samples) {
    const std::uint32_t raw = std::bit_cast<std::uint32_t>(static_cast<float>(s));
    unsigned char b[4] = {static_cast<unsigned char>(raw & 0xff),
                          static_cast<unsigned char>((raw >> 8) & 0xff),
                          static_cast<unsigned char>((raw >> 16) & 0xff),
                          static_cast<unsigned char>((raw >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
  if (!out) {
    raise(ErrorCategory::io, "short write for wav file: " + path.string());
  }
}

FrameGrid frame_grid(std::size_t n_samples, std::size_t frame_len_samples,
                     std::size_t hop_samples) {
  if (hop_samples < 1 || frame_len_samples < hop_samples) {
    raise(ErrorCategory::contract,
          "frame_grid requires frame_len >= hop >= 1");
  }
  FrameGrid grid;
  grid.frame_len_samples = frame_len_samples;
  grid.hop_samples = hop_samples;
  grid.n_frames = n_samples >= frame_len_samples
                      ? (n_samples - frame_len_samples) / hop_samples + 1
                      : 0;
  return grid;
}

std::span<const double> frame_window(const Waveform& w, const FrameGrid& grid,
                                     std::size_t t) {
  if (t >= grid.n_frames) {
    raise(ErrorCategory::contract, "frame index out of range");
  }
  return {w.samples.data() + t * grid.hop_samples, grid.frame_len_samples};
}

}  // namespace prosoval
