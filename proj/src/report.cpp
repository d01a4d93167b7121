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

#include "prosoval/report.hpp"

#include <charconv>
#include <sstream>

namespace prosoval {

namespace {

ordered_json correlation_or_null(const std::optional<double>& v) {
  if (v.has_value()) {
    return *v;
  }
  return nullptr;
}

std::string csv_value(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : "NA";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ordered_json to_json(const EvalReport& report) {
  ordered_json j;
  j["utterance_id"] = report.utterance_id;
  j["mcd_db"] = report.mcd_db;
  j["ucorr"] = correlation_or_null(report.ucorr);
  j["ptcorr"] = correlation_or_null(report.ptcorr);
  j["partial_f0_variation_hz"] = report.partial_f0_variation_hz;
  j["n_words"] = report.n_words;
  j["n_voiced_frames_common"] = report.n_voiced_frames_common;
  j["exclusions"] = {
      {"ucorr_undefined", !report.ucorr.has_value()},
      {"ptcorr_undefined", !report.ptcorr.has_value()},
      {"ptcorr_words_excluded", report.ptcorr_words_excluded},
  };
  return j;
}

ordered_json to_json(const CorpusReport& corpus,
                     const std::vector<RowFailure>& failures) {
  ordered_json j;
  j["method"] = corpus.method;
  j["mcd_db"] = corpus.mcd_db;
  j["ucorr"] = correlation_or_null(corpus.ucorr);
  j["ptcorr"] = correlation_or_null(corpus.ptcorr);
  j["partial_f0_variation_hz"] = corpus.partial_f0_variation_hz;
  j["n_utterances"] = corpus.n_utterances;
  j["n_words_mean"] = corpus.n_words_mean;
  j["n_voiced_frames_common_mean"] = corpus.n_voiced_frames_common_mean;
  j["exclusions"] = {
      {"ucorr", corpus.ucorr_excluded},
      {"ptcorr", corpus.ptcorr_excluded},
  };
  ordered_json errors = ordered_json::array();
  for (const RowFailure& failure : failures) {
    errors.push_back({
        {"utterance_id", failure.utterance_id},
        {"error", failure.message},
        {"category", std::string(category_name(failure.category))},
    });
  }
  j["errors"] = errors;
  return j;
}

ordered_json to_json(const CheckResult& result) {
  ordered_json j;
  j["variant"] = variant_name(result.variant);
  j["pass"] = result.pass;
  ordered_json mismatches = ordered_json::array();
  for (const ShapeMismatch& m : result.mismatches) {
    mismatches.push_back({
        {"layer", m.layer},
        {"expected_in", m.expected_in},
        {"actual_in", m.actual_in},
    });
  }
  j["mismatches"] = mismatches;
  j["param_count"] = result.param_count;
  j["assumptions"] = {
      {"kernel", result.assumptions.conv_kernel},
      {"vocab", result.assumptions.vocab},
      {"classifier_full_hidden", result.assumptions.classifier_full_hidden},
  };
  return j;
}

ordered_json to_json(const MosSummary& summary) {
  ordered_json j;
  ordered_json systems = ordered_json::array();
  for (const SystemMos& sys : summary.systems) {
    systems.push_back({
        {"system", sys.system},
        {"mos", sys.mean},
        {"ci95", sys.ci95},
        {"display", format_mos(sys.mean, sys.ci95)},
        {"n_utterances", sys.n_utterances},
        {"n_raters_kept", sys.n_raters_kept},
        {"n_raters_removed", sys.n_raters_removed},
    });
  }
  j["systems"] = systems;
  j["n_raters_removed_total"] = summary.n_raters_removed_total;
  j["unverified_raters"] = summary.unverified;
  return j;
}

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "utterance_id,mcd_db,ucorr,ptcorr,partial_f0_variation_hz,"
         "n_words,n_voiced_frames_common\n";
  out << report.utterance_id << ',' << format_double(report.mcd_db) << ','
      << csv_value(report.ucorr) << ',' << csv_value(report.ptcorr) << ','
      << format_double(report.partial_f0_variation_hz) << ',' << report.n_words
      << ',' << report.n_voiced_frames_common << '\n';
  return out.str();
}

std::string corpus_report_csv(const CorpusReport& corpus) {
  std::ostringstream out;
  out << "method,mcd_db,ucorr,ptcorr,partial_f0_variation_hz,n_utterances\n";
  out << corpus.method << ',' << format_double(corpus.mcd_db) << ','
      << csv_value(corpus.ucorr) << ',' << csv_value(corpus.ptcorr) << ','
      << format_double(corpus.partial_f0_variation_hz) << ','
      << corpus.n_utterances << '\n';
  return out.str();
}

std::string features_csv(const MfccMatrix& mfcc, const F0Contour& f0) {
  std::ostringstream out;
  out << "time_s,f0_hz,voiced";
  for (std::size_t k = 1; k <= MfccMatrix::kCoeffs; ++k) {
    out << ",c" << k;
  }
  out << '\n';
  const std::size_t rows = std::max(mfcc.n_frames, f0.n_frames());
  const double hop = mfcc.n_frames > 0 ? mfcc.hop_s : f0.hop_s;
  for (std::size_t t = 0; t < rows; ++t) {
    out << format_double(static_cast<double>(t) * hop);
    if (t < f0.n_frames()) {
      out << ',' << format_double(f0.f0_hz[t]) << ',' << (f0.voiced[t] ? 1 : 0);
    } else {
      out << ",,";
    }
    for (std::size_t k = 0; k < MfccMatrix::kCoeffs; ++k) {
      out << ',';
      if (t < mfcc.n_frames) {
        out << format_double(mfcc.row(t)[k]);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace prosoval
