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

#include "prosoval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "prosoval/align.hpp"
#include "prosoval/error.hpp"
#include "prosoval/log.hpp"
#include "prosoval/signal.hpp"

namespace prosoval {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string required_string(const nlohmann::json& obj, const char* key,
                            const std::string& origin) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    raise(ErrorCategory::format,
          origin + ": manifest row needs string \"" + key + "\"");
  }
  return obj[key].get<std::string>();
}

template <typename T>
void read_number(const nlohmann::json& obj, const std::string& key, T& out,
                 const std::string& origin) {
  const auto& v = obj.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      raise(ErrorCategory::configuration, origin + ": \"" + key + "\" must be an integer");
    }
  } else {
    if (!v.is_number()) {
      raise(ErrorCategory::configuration, origin + ": \"" + key + "\" must be a number");
    }
  }
  out = v.get<T>();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCategory::io, "cannot open manifest: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorCategory::format, path.string() + ": manifest parse error: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    raise(ErrorCategory::format, path.string() + ": manifest needs a \"pairs\" array");
  }

  Manifest manifest;
  if (doc.contains("method")) {
    if (!doc["method"].is_string()) {
      raise(ErrorCategory::format, path.string() + ": \"method\" must be a string");
    }
    manifest.method = doc["method"].get<std::string>();
  }
  const std::filesystem::path base = path.parent_path();
  std::set<std::string> seen_ids;
  for (const auto& row : doc["pairs"]) {
    if (!row.is_object()) {
      raise(ErrorCategory::format, path.string() + ": manifest rows must be objects");
    }
    ManifestRow out;
    out.utterance_id = required_string(row, "utterance_id", path.string());
    out.natural_wav = resolve(base, required_string(row, "natural_wav", path.string()));
    out.synth_wav = resolve(base, required_string(row, "synth_wav", path.string()));
    out.alignment = resolve(base, required_string(row, "alignment", path.string()));
    if (!seen_ids.insert(out.utterance_id).second) {
      raise(ErrorCategory::validation,
            path.string() + ": duplicate utterance_id \"" + out.utterance_id + "\"");
    }
    manifest.pairs.push_back(std::move(out));
  }
  return manifest;
}

CorpusRun run_corpus(const Manifest& manifest, const FeatureConfig& cfg,
                     int jobs) {
  if (jobs < 1) {
    raise(ErrorCategory::configuration, "parallelism degree must be >= 1");
  }
  cfg.validate();

  struct Slot {
    bool ok = false;
    EvalReport report;
    RowFailure failure;
  };
  std::vector<Slot> slots(manifest.pairs.size());

  auto evaluate_row = [&](std::size_t index) {
    const ManifestRow& row = manifest.pairs[index];
    Slot& slot = slots[index];
    try {
      const AlignmentPair alignment = load_alignment(row.alignment);
      const Waveform natural = load_wav(row.natural_wav);
      const Waveform synthesized = load_wav(row.synth_wav);
      slot.report = evaluate_pair(natural, synthesized, alignment, cfg,
                                  row.utterance_id);
      slot.ok = true;
    } catch (const Error& e) {
      slot.failure = {row.utterance_id, e.what(), e.category()};
    }
  };

  const int workers = std::min<int>(jobs, static_cast<int>(manifest.pairs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < manifest.pairs.size(); ++i) {
      evaluate_row(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= slots.size()) {
            return;
          }
          evaluate_row(i);
        }
      });
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  CorpusRun run;
  for (Slot& slot : slots) {
    if (slot.ok) {
      run.reports.push_back(std::move(slot.report));
    } else {
      run.failures.push_back(std::move(slot.failure));
    }
  }
  std::sort(run.reports.begin(), run.reports.end(),
            [](const EvalReport& a, const EvalReport& b) {
              return a.utterance_id < b.utterance_id;
            });
  std::sort(run.failures.begin(), run.failures.end(),
            [](const RowFailure& a, const RowFailure& b) {
              return a.utterance_id < b.utterance_id;
            });
  if (!run.reports.empty()) {
    run.corpus = aggregate_corpus(run.reports);
  }
  run.corpus.method = manifest.method;
  log::info("corpus: %zu ok, %zu failed", run.reports.size(), run.failures.size());
  return run;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCategory::io, "cannot open config: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorCategory::format, path.string() + ": config parse error: " + e.what());
  }
  if (!doc.is_object()) {
    raise(ErrorCategory::format, path.string() + ": config must be a JSON object");
  }

  RunConfig config;
  const std::string origin = path.string();
  for (const auto& [section, body] : doc.items()) {
    if (section == "features") {
      for (const auto& [key, value] : body.items()) {
        (void)value;
        FeatureConfig& f = config.features;
        if (key == "frame_len_s") read_number(body, key, f.frame_len_s, origin);
        else if (key == "hop_s") read_number(body, key, f.hop_s, origin);
        else if (key == "n_fft") read_number(body, key, f.n_fft, origin);
        else if (key == "n_mels") read_number(body, key, f.n_mels, origin);
        else if (key == "mel_fmin_hz") read_number(body, key, f.mel_fmin_hz, origin);
        else if (key == "mel_fmax_hz") read_number(body, key, f.mel_fmax_hz, origin);
        else if (key == "log_floor") read_number(body, key, f.log_floor, origin);
        else if (key == "f0_min_hz") read_number(body, key, f.f0_min_hz, origin);
        else if (key == "f0_max_hz") read_number(body, key, f.f0_max_hz, origin);
        else if (key == "yin_threshold") read_number(body, key, f.yin_threshold, origin);
        else raise(ErrorCategory::configuration,
                   origin + ": unknown features key \"" + key + "\"");
      }
    } else if (section == "archcheck") {
      for (const auto& [key, value] : body.items()) {
        ArchConfig& a = config.archcheck;
        if (key == "kernel") read_number(body, key, a.conv_kernel, origin);
        else if (key == "vocab") read_number(body, key, a.vocab, origin);
        else if (key == "classifier_full_hidden") {
          if (!value.is_boolean()) {
            raise(ErrorCategory::configuration,
                  origin + ": \"classifier_full_hidden\" must be a boolean");
          }
          a.classifier_full_hidden = value.get<bool>();
        }
        else raise(ErrorCategory::configuration,
                   origin + ": unknown archcheck key \"" + key + "\"");
      }
    } else {
      raise(ErrorCategory::configuration,
            origin + ": unknown config section \"" + section + "\"");
    }
  }
  // Range validation happens on the effective config, after any flag
  // overrides have been merged in.
  return config;
}

}  // namespace prosoval
