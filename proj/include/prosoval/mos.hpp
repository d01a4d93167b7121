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

#ifndef PROSOVAL_MOS_HPP
#define PROSOVAL_MOS_HPP

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace prosoval {

struct Rating {
  std::string rater_id;
  std::string system;
  std::string utterance_id;
  int score = 0;  // 1..5
  bool is_control = false;
};

struct RatingTable {
  std::vector<Rating> rows;
};

// Allowed score band for one control utterance.
struct ControlBand {
  std::string utterance_id;
  int lo = 1;
  int hi = 5;
};

struct ControlSpec {
  std::vector<ControlBand> controls;
};

// CSV with header rater_id,system,utterance_id,score,is_control.
// Scores outside 1..5 and duplicate (rater, system, utterance) keys
// are validation errors reported with their row number.
RatingTable load_ratings(const std::filesystem::path& path);
RatingTable parse_ratings_csv(std::istream& in, const std::string& origin);

// {"controls": [{"utterance_id": ..., "lo": ..., "hi": ...}, ...]}
ControlSpec load_control_spec(const std::filesystem::path& path);
ControlSpec parse_control_spec(const std::string& json_text,
                               const std::string& origin);

struct FilterOutcome {
  RatingTable kept;  // non-control rows of raters that passed every band

  struct Removal {
    std::string rater_id;
    std::string control_utterance_id;
    int score = 0;
    int lo = 0;
    int hi = 0;
  };
  std::vector<Removal> removed;

  // Raters that never rated any control; kept, but flagged.
  std::vector<std::string> unverified;
};

// Removes every row of any rater whose rating of a control utterance
// falls outside that control's band. Control rows of kept raters are
// excluded from the output as well, which makes the operation
// idempotent. A spec id absent from a table that still carries control
// rows is a configuration error.
FilterOutcome filter_raters(const RatingTable& table, const ControlSpec& spec);

struct SystemMos {
  std::string system;
  double mean = 0.0;
  double ci95 = 0.0;
  int n_raters_kept = 0;
  int n_raters_removed = 0;
  int n_utterances = 0;
};

struct MosSummary {
  std::vector<SystemMos> systems;  // sorted by system name
  int n_raters_removed_total = 0;
  std::vector<std::string> unverified;
};

// Two-level aggregation: per-utterance mean over raters, then mean
// over utterances; ci95 = 1.96 * s / sqrt(n) with s the sample standard
// deviation of the per-utterance means and n the utterance count.
// Systems with fewer than two utterances are an insufficient-data
// error.
MosSummary mos_summary(const RatingTable& filtered);

// Filter + summary, with removal counts folded into the result.
MosSummary summarize_mos(const RatingTable& table, const ControlSpec& spec);

// "4.148±0.192"-style rendering, three decimals.
std::string format_mos(double mean, double ci95);

// Plain-text table with Method and MOS columns.
std::string render_mos_table(const MosSummary& summary);

}  // namespace prosoval

#endif  // PROSOVAL_MOS_HPP
