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

#ifndef PROSOVAL_REPORT_HPP
#define PROSOVAL_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "prosoval/archcheck.hpp"
#include "prosoval/error.hpp"
#include "prosoval/features.hpp"
#include "prosoval/metrics.hpp"
#include "prosoval/mos.hpp"

namespace prosoval {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal rendering; identical inputs give
// identical bytes, which the corpus determinism contract relies on.
std::string format_double(double v);

struct RowFailure {
  std::string utterance_id;
  std::string message;
  ErrorCategory category = ErrorCategory::io;
};

ordered_json to_json(const EvalReport& report);
ordered_json to_json(const CorpusReport& corpus,
                     const std::vector<RowFailure>& failures);
ordered_json to_json(const CheckResult& result);
ordered_json to_json(const MosSummary& summary);

std::string eval_report_csv(const EvalReport& report);
std::string corpus_report_csv(const CorpusReport& corpus);

// One row per frame: time_s, f0_hz, voiced, c1..c13. The MFCC and F0
// grids share a hop but not a window, so rows cover the longer of the
// two with the other's columns left blank past its end.
std::string features_csv(const MfccMatrix& mfcc, const F0Contour& f0);

}  // namespace prosoval

#endif  // PROSOVAL_REPORT_HPP
