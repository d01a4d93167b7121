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

#include "prosoval/mos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "prosoval/error.hpp"

namespace prosoval {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    fields.push_back("");
  }
  return fields;
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

}  // namespace

RatingTable parse_ratings_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCategory::format, origin + ": empty ratings file");
  }
  const auto header = split_csv_row(line);
  const std::vector<std::string> expected = {"rater_id", "system",
                                             "utterance_id", "score",
                                             "is_control"};
  if (header != expected) {
    raise(ErrorCategory::format,
          origin + ": header must be rater_id,system,utterance_id,score,is_control");
  }

  RatingTable table;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_row(line);
    if (fields.size() != 5) {
      raise(ErrorCategory::validation,
            origin + ": row " + std::to_string(row_number) + " has " +
                std::to_string(fields.size()) + " fields, expected 5");
    }
    Rating r;
    r.rater_id = fields[0];
    r.system = fields[1];
    r.utterance_id = fields[2];
    try {
      std::size_t used = 0;
      r.score = std::stoi(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      raise(ErrorCategory::validation,
            origin + ": row " + std::to_string(row_number) +
                " has non-integer score \"" + fields[3] + "\"");
    }
    if (r.score < 1 || r.score > 5) {
      raise(ErrorCategory::validation,
            origin + ": row " + std::to_string(row_number) + " score " +
                std::to_string(r.score) + " outside 1..5");
    }
    if (!parse_bool(fields[4], r.is_control)) {
      raise(ErrorCategory::validation,
            origin + ": row " + std::to_string(row_number) +
                " has non-boolean is_control \"" + fields[4] + "\"");
    }
    if (!seen.insert({r.rater_id, r.system, r.utterance_id}).second) {
      raise(ErrorCategory::validation,
            origin + ": row " + std::to_string(row_number) + " duplicates (" +
                r.rater_id + ", " + r.system + ", " + r.utterance_id + ")");
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

RatingTable load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCategory::io, "cannot open ratings file: " + path.string());
  }
  return parse_ratings_csv(in, path.string());
}

ControlSpec parse_control_spec(const std::string& json_text,
                               const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorCategory::format, origin + ": control spec parse error: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("controls") || !doc["controls"].is_array()) {
    raise(ErrorCategory::format, origin + ": control spec needs a \"controls\" array");
  }
  ControlSpec spec;
  for (const auto& item : doc["controls"]) {
    if (!item.is_object() || !item.contains("utterance_id") ||
        !item.contains("lo") || !item.contains("hi") ||
        !item["utterance_id"].is_string() ||
        !item["lo"].is_number_integer() || !item["hi"].is_number_integer()) {
      raise(ErrorCategory::format,
            origin + ": each control needs utterance_id, lo, hi");
    }
    ControlBand band;
    band.utterance_id = item["utterance_id"].get<std::string>();
    band.lo = item["lo"].get<int>();
    band.hi = item["hi"].get<int>();
    if (band.lo < 1 || band.hi > 5 || band.lo > band.hi) {
      raise(ErrorCategory::validation,
            origin + ": control \"" + band.utterance_id +
                "\" band must satisfy 1 <= lo <= hi <= 5");
    }
    spec.controls.push_back(std::move(band));
  }
  return spec;
}

ControlSpec load_control_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCategory::io, "cannot open control spec: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_control_spec(buf.str(), path.string());
}

FilterOutcome filter_raters(const RatingTable& table, const ControlSpec& spec) {
  std::map<std::string, ControlBand> bands;
  for (const ControlBand& band : spec.controls) {
    bands[band.utterance_id] = band;
  }

  bool table_has_controls = false;
  std::set<std::string> control_ids_in_table;
  for (const Rating& r : table.rows) {
    if (r.is_control) {
      table_has_controls = true;
      control_ids_in_table.insert(r.utterance_id);
    } else if (bands.count(r.utterance_id) != 0) {
      raise(ErrorCategory::configuration,
            "utterance \"" + r.utterance_id +
                "\" is listed as a control but not marked is_control in the table");
    }
  }
  // A table with no control rows passes through unchanged (it has
  // already been filtered); otherwise every configured control id must
  // be present.
  if (table_has_controls) {
    for (const auto& [id, band] : bands) {
      if (control_ids_in_table.count(id) == 0) {
        raise(ErrorCategory::configuration,
              "control spec references unknown utterance_id \"" + id + "\"");
      }
    }
  }

  FilterOutcome outcome;
  std::set<std::string> violators;
  std::set<std::string> verified;
  for (const Rating& r : table.rows) {
    if (!r.is_control) {
      continue;
    }
    const auto it = bands.find(r.utterance_id);
    if (it == bands.end()) {
      continue;  // control row without a configured band: excluded, no verdict
    }
    verified.insert(r.rater_id);
    if (r.score < it->second.lo || r.score > it->second.hi) {
      if (violators.insert(r.rater_id).second) {
        outcome.removed.push_back({r.rater_id, r.utterance_id, r.score,
                                   it->second.lo, it->second.hi});
      }
    }
  }

  std::set<std::string> all_raters;
  for (const Rating& r : table.rows) {
    all_raters.insert(r.rater_id);
  }
  for (const std::string& rater : all_raters) {
    if (verified.count(rater) == 0 && violators.count(rater) == 0) {
      outcome.unverified.push_back(rater);
    }
  }

  for (const Rating& r : table.rows) {
    if (!r.is_control && violators.count(r.rater_id) == 0) {
      outcome.kept.rows.push_back(r);
    }
  }
  return outcome;
}

MosSummary mos_summary(const RatingTable& filtered) {
  if (filtered.rows.empty()) {
    raise(ErrorCategory::validation, "no ratings left to summarize");
  }
  // system -> utterance -> scores
  std::map<std::string, std::map<std::string, std::vector<int>>> by_system;
  std::map<std::string, std::set<std::string>> raters_by_system;
  for (const Rating& r : filtered.rows) {
    by_system[r.system][r.utterance_id].push_back(r.score);
    raters_by_system[r.system].insert(r.rater_id);
  }

  MosSummary summary;
  for (const auto& [system, utterances] : by_system) {
    if (utterances.size() < 2) {
      raise(ErrorCategory::validation,
            "system \"" + system + "\" has fewer than two utterances");
    }
    std::vector<double> utterance_means;
    utterance_means.reserve(utterances.size());
    for (const auto& [utt, scores] : utterances) {
      double sum = 0.0;
      for (int score : scores) {
        sum += score;
      }
      utterance_means.push_back(sum / static_cast<double>(scores.size()));
    }
    const auto n = static_cast<double>(utterance_means.size());
    double mean = 0.0;
    for (double m : utterance_means) {
      mean += m;
    }
    mean /= n;
    double ss = 0.0;
    for (double m : utterance_means) {
      ss += (m - mean) * (m - mean);
    }
    const double stddev = std::sqrt(ss / (n - 1.0));
    SystemMos sys;
    sys.system = system;
    sys.mean = mean;
    sys.ci95 = 1.96 * stddev / std::sqrt(n);
    sys.n_utterances = static_cast<int>(utterances.size());
    sys.n_raters_kept = static_cast<int>(raters_by_system[system].size());
    summary.systems.push_back(std::move(sys));
  }
  return summary;
}

MosSummary summarize_mos(const RatingTable& table, const ControlSpec& spec) {
  const FilterOutcome outcome = filter_raters(table, spec);
  MosSummary summary = mos_summary(outcome.kept);
  summary.n_raters_removed_total = static_cast<int>(outcome.removed.size());
  summary.unverified = outcome.unverified;

  // Removed raters counted against each system they rated.
  std::map<std::string, std::set<std::string>> removed_by_system;
  std::set<std::string> removed_ids;
  for (const auto& removal : outcome.removed) {
    removed_ids.insert(removal.rater_id);
  }
  for (const Rating& r : table.rows) {
    if (removed_ids.count(r.rater_id) != 0) {
      removed_by_system[r.system].insert(r.rater_id);
    }
  }
  for (SystemMos& sys : summary.systems) {
    const auto it = removed_by_system.find(sys.system);
    sys.n_raters_removed = it == removed_by_system.end()
                               ? 0
                               : static_cast<int>(it->second.size());
  }
  return summary;
}

std::string format_mos(double mean, double ci95) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f±%.3f", mean, ci95);
  return buf;
}

std::string render_mos_table(const MosSummary& summary) {
  std::size_t width = std::string("Method").size();
  for (const SystemMos& sys : summary.systems) {
    width = std::max(width, sys.system.size());
  }
  std::ostringstream out;
  out << "Method";
  out << std::string(width - 6 + 2, ' ') << "MOS\n";
  for (const SystemMos& sys : summary.systems) {
    out << sys.system << std::string(width - sys.system.size() + 2, ' ')
        << format_mos(sys.mean, sys.ci95) << "\n";
  }
  return out.str();
}

}  // namespace prosoval
