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

#ifndef PROSOVAL_RUNNER_HPP
#define PROSOVAL_RUNNER_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "prosoval/archcheck.hpp"
#include "prosoval/features.hpp"
#include "prosoval/metrics.hpp"
#include "prosoval/report.hpp"

namespace prosoval {

struct ManifestRow {
  std::string utterance_id;
  std::filesystem::path natural_wav;
  std::filesystem::path synth_wav;
  std::filesystem::path alignment;
};

// {"method": optional string, "pairs": [{"utterance_id", "natural_wav",
//  "synth_wav", "alignment"}, ...]}. Relative paths resolve against the
// manifest's directory.
struct Manifest {
  std::string method = "corpus";
  std::vector<ManifestRow> pairs;
};

Manifest load_manifest(const std::filesystem::path& path);

struct CorpusRun {
  std::vector<EvalReport> reports;    // sorted by utterance_id
  std::vector<RowFailure> failures;   // sorted by utterance_id
  CorpusReport corpus;                // aggregated over the successes
};

// Evaluates every manifest row, up to `jobs` rows concurrently. Row
// order and parallelism degree do not affect the result: reports are
// keyed and sorted by utterance_id, each pair is evaluated
// independently, and aggregation runs after the join.
CorpusRun run_corpus(const Manifest& manifest, const FeatureConfig& cfg,
                     int jobs);

// Optional JSON config file: {"features": {...}, "archcheck": {...}}.
// Unknown keys are configuration errors.
struct RunConfig {
  FeatureConfig features;
  ArchConfig archcheck;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace prosoval

#endif  // PROSOVAL_RUNNER_HPP
