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

#ifndef PROSOVAL_SIGNAL_HPP
#define PROSOVAL_SIGNAL_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace prosoval {

// Mono audio, samples normalized to [-1, 1]. Immutable by convention
// after construction; all downstream operations are pure.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct FrameGrid {
  std::size_t frame_len_samples = 0;
  std::size_t hop_samples = 0;
  std::size_t n_frames = 0;
};

// Reads a RIFF/WAVE file. PCM 16-bit integer and 32-bit float payloads
// are supported; multichannel input is averaged to mono; integer
// samples are scaled by 1/32768. Unknown chunks are skipped.
Waveform load_wav(const std::filesystem::path& path);

// Writes mono 32-bit float PCM. Reloading reproduces the samples
// bit-exactly for float-representable values.
void save_wav_float32(const Waveform& w, const std::filesystem::path& path);

// n_frames = floor((len - frame_len) / hop) + 1 when len >= frame_len,
// else 0. A final partial frame is dropped, never padded.
FrameGrid frame_grid(std::size_t n_samples, std::size_t frame_len_samples,
                     std::size_t hop_samples);

inline FrameGrid frame_grid(const Waveform& w, std::size_t frame_len_samples,
                            std::size_t hop_samples) {
  return frame_grid(w.samples.size(), frame_len_samples, hop_samples);
}

// Samples covered by frame t: [t*hop, t*hop + frame_len).
std::span<const double> frame_window(const Waveform& w, const FrameGrid& grid,
                                     std::size_t t);

}  // namespace prosoval

#endif  // PROSOVAL_SIGNAL_HPP
