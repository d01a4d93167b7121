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

#include <cstdint>
#include <random>

#include <doctest.h>

#include "prosoval/error.hpp"
#include "testutil.hpp"

using namespace prosoval;

namespace {

void append_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::string pcm16_wav(const std::vector<std::int16_t>& samples, int channels,
                      int sample_rate) {
  std::string data;
  for (std::int16_t s : samples) {
    append_u16(data, static_cast<std::uint16_t>(s));
  }
  std::string out = "RIFF";
  append_u32(out, static_cast<std::uint32_t>(36 + data.size()));
  out += "WAVEfmt ";
  append_u32(out, 16);
  append_u16(out, 1);  // PCM
  append_u16(out, static_cast<std::uint16_t>(channels));
  append_u32(out, static_cast<std::uint32_t>(sample_rate));
  append_u32(out, static_cast<std::uint32_t>(sample_rate * channels * 2));
  append_u16(out, static_cast<std::uint16_t>(channels * 2));
  append_u16(out, 16);
  out += "data";
  append_u32(out, static_cast<std::uint32_t>(data.size()));
  out += data;
  return out;
}

}  // namespace

TEST_CASE("pcm16 samples scale by 1/32768") {
  const auto dir = testutil::make_temp_dir("signal");
  const auto path = dir / "scale.wav";
  testutil::write_file(path, pcm16_wav({0, 16384, -16384}, 1, 22050));

  const Waveform w = load_wav(path);
  CHECK(w.sample_rate_hz == 22050);
  REQUIRE(w.samples.size() == 3);
  CHECK(w.samples[0] == 0.0);
  CHECK(w.samples[1] == 0.5);
  CHECK(w.samples[2] == -0.5);
}

TEST_CASE("stereo input averages to mono") {
  const auto dir = testutil::make_temp_dir("signal");
  const auto path = dir / "stereo.wav";
  testutil::write_file(path, pcm16_wav({32767, 0}, 2, 8000));
  const Waveform w = load_wav(path);
  REQUIRE(w.samples.size() == 1);
  CHECK(w.samples[0] == doctest::Approx((32767.0 / 32768.0) / 2.0));
}

TEST_CASE("malformed and unsupported files raise format errors") {
  const auto dir = testutil::make_temp_dir("signal");

  SUBCASE("truncated header") {
    const auto path = dir / "trunc.wav";
    testutil::write_file(path, "RIF");
    try {
      load_wav(path);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::format);
    }
  }

  SUBCASE("unsupported codec") {
    const auto path = dir / "alaw.wav";
    std::string bytes = pcm16_wav({0, 0}, 1, 8000);
    bytes[20] = 6;  // format tag: A-law
    testutil::write_file(path, bytes);
    try {
      load_wav(path);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::format);
      CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
    }
  }

  SUBCASE("empty payload") {
    const auto path = dir / "empty.wav";
    testutil::write_file(path, pcm16_wav({}, 1, 8000));
    try {
      load_wav(path);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::format);
      CHECK(std::string(e.what()).find("empty signal") != std::string::npos);
    }
  }

  SUBCASE("missing file is an io error") {
    try {
      load_wav(dir / "nope.wav");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::io);
    }
  }
}

TEST_CASE("float32 write/reload round-trips bit-exactly") {
  const auto dir = testutil::make_temp_dir("signal");
  std::mt19937 rng(42);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);

  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.resize(1000);
  for (double& s : w.samples) {
    s = static_cast<double>(dist(rng));  // float-representable by construction
  }
  const auto path = dir / "roundtrip.wav";
  save_wav_float32(w, path);
  const Waveform back = load_wav(path);
  CHECK(back.sample_rate_hz == w.sample_rate_hz);
  REQUIRE(back.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(back.samples[i] == w.samples[i]);
  }
}

TEST_CASE("framing count formula") {
  CHECK(frame_grid(100, 40, 20).n_frames == 4);
  CHECK(frame_grid(39, 40, 20).n_frames == 0);
  CHECK(frame_grid(40, 40, 20).n_frames == 1);

  SUBCASE("property over random sizes") {
    std::mt19937 rng(3);
    for (int round = 0; round < 300; ++round) {
      const std::size_t frame = 1 + rng() % 400;
      const std::size_t hop = 1 + rng() % frame;
      const std::size_t len = rng() % 5000;
      const FrameGrid grid = frame_grid(len, frame, hop);
      const std::size_t expected = len >= frame ? (len - frame) / hop + 1 : 0;
      CHECK(grid.n_frames == expected);
      if (grid.n_frames > 0) {
        // The last frame fits entirely and one more would not.
        CHECK((grid.n_frames - 1) * hop + frame <= len);
        CHECK(grid.n_frames * hop + frame > len);
      }
    }
  }

  SUBCASE("hop above frame length is rejected") {
    CHECK_THROWS_AS(frame_grid(100, 10, 20), Error);
  }
}

TEST_CASE("frame windows cover the expected samples") {
  Waveform w;
  w.sample_rate_hz = 100;
  for (int i = 0; i < 10; ++i) {
    w.samples.push_back(i);
  }
  const FrameGrid grid = frame_grid(w, 4, 2);
  REQUIRE(grid.n_frames == 4);
  const auto f1 = frame_window(w, grid, 1);
  CHECK(f1[0] == 2.0);
  CHECK(f1[3] == 5.0);
  CHECK_THROWS_AS(frame_window(w, grid, 4), Error);
}
