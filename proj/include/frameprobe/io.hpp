// Copyright 2026 The Frameprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File ingestion and emission. Malformed lines are never silently dropped:
// they land in a line-error list with their 1-based line numbers, and
// records that parse but violate invariants (gold not schema-valid,
// misaligned probabilities) are quarantined with reasons. Quarantined
// records contribute to no metric.
//
// All files are UTF-8. A leading BOM is tolerated on read and never
// written; CRLF and LF line endings load identically.

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/oracle.hpp"
#include "frameprobe/records.hpp"

#include <json.hpp>

namespace frameprobe {

enum class FileFormat { TSV, JSONL };

inline std::optional<FileFormat> parse_file_format(std::string_view s) {
  if (s == "tsv") return FileFormat::TSV;
  if (s == "jsonl") return FileFormat::JSONL;
  return std::nullopt;
}

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

// One utterance/frame pair plus optional corpus tags.
struct DatasetRow {
  std::size_t line = 0;  // 1-based line in the source file
  std::string utterance;
  std::string frame;
  std::optional<std::string> language;
  std::optional<std::string> domain;
};

struct DatasetLoad {
  std::vector<DatasetRow> rows;
  std::vector<LineError> errors;
};

struct PredictionsLoad {
  std::vector<PredictionRecord> records;
  std::vector<LineError> errors;      // lines that failed to parse at all
  std::vector<LineError> quarantine;  // parsed records violating invariants
};

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile(path);
  std::vector<std::string> lines;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      first = false;
    }
    lines.push_back(line);
  }
  return lines;
}

inline bool blank(std::string_view s) {
  for (char c : s)
    if (!is_space(c)) return false;
  return true;
}

inline std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = s.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(s.substr(start));
      break;
    }
    cols.push_back(s.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

inline std::optional<std::string> opt_string(const nlohmann::json& j,
                                             const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

}  // namespace detail

// ============================================================================
// Dataset loading
// ============================================================================

// TSV: utterance TAB frame [TAB language [TAB domain]]
// JSONL: {"utterance": ..., "frame": ..., "language"?: ..., "domain"?: ...}
// Throws UnreadableFile / EmptyDataset; per-line failures are collected.
inline DatasetLoad load_dataset(const std::string& path, FileFormat format) {
  const std::vector<std::string> lines = detail::read_lines(path);

  DatasetLoad out;
  bool any_content = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t lineno = i + 1;
    if (detail::blank(line)) continue;
    any_content = true;

    if (format == FileFormat::TSV) {
      const auto cols = detail::split_tabs(line);
      if (cols.size() < 2) {
        out.errors.push_back({lineno, "expected at least 2 tab-separated "
                                      "columns (utterance, frame)"});
        continue;
      }
      DatasetRow row;
      row.line = lineno;
      row.utterance = std::string(cols[0]);
      row.frame = std::string(cols[1]);
      if (cols.size() >= 3 && !cols[2].empty())
        row.language = std::string(cols[2]);
      if (cols.size() >= 4 && !cols[3].empty())
        row.domain = std::string(cols[3]);
      out.rows.push_back(std::move(row));
    } else {
      try {
        const nlohmann::json j = nlohmann::json::parse(line);
        DatasetRow row;
        row.line = lineno;
        row.utterance = j.at("utterance").get<std::string>();
        row.frame = j.at("frame").get<std::string>();
        row.language = detail::opt_string(j, "language");
        row.domain = detail::opt_string(j, "domain");
        out.rows.push_back(std::move(row));
      } catch (const nlohmann::json::exception& e) {
        out.errors.push_back({lineno, e.what()});
      }
    }
  }
  if (!any_content) throw EmptyDataset(path);
  return out;
}

// ============================================================================
// Prediction loading
// ============================================================================

inline constexpr int kRecordSchemaVersion = 1;

inline nlohmann::json to_json(const PredictionRecord& r) {
  nlohmann::json j;
  j["utterance"] = r.utterance;
  j["gold"] = r.gold;
  j["pred"] = r.pred;
  if (r.token_probs) j["token_probs"] = *r.token_probs;
  if (r.forced_pred) j["forced_pred"] = *r.forced_pred;
  if (r.language) j["language"] = *r.language;
  if (r.domain) j["domain"] = *r.domain;
  if (r.injected_type) j["injected_type"] = *r.injected_type;
  if (r.injected_position) j["injected_position"] = *r.injected_position;
  if (r.injected_detail) j["injected_detail"] = *r.injected_detail;
  return j;
}

// JSONL, one PredictionRecord per line. Unparseable lines go to `errors`;
// records violating invariants go to `quarantine` and are excluded from
// `records`. Validation: gold tokenizes and is schema-valid; pred
// tokenizes; token_probs, when present, aligns with pred and stays in
// (0,1].
inline PredictionsLoad load_predictions(const std::string& path,
                                        TokenizeOptions opts = {}) {
  const std::vector<std::string> lines = detail::read_lines(path);

  PredictionsLoad out;
  bool any_content = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t lineno = i + 1;
    if (detail::blank(line)) continue;
    any_content = true;

    PredictionRecord rec;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      rec.utterance = j.at("utterance").get<std::string>();
      rec.gold = j.at("gold").get<std::string>();
      rec.pred = j.at("pred").get<std::string>();
      if (j.contains("token_probs") && !j["token_probs"].is_null())
        rec.token_probs = j["token_probs"].get<std::vector<double>>();
      rec.forced_pred = detail::opt_string(j, "forced_pred");
      rec.language = detail::opt_string(j, "language");
      rec.domain = detail::opt_string(j, "domain");
      rec.injected_type = detail::opt_string(j, "injected_type");
      if (j.contains("injected_position") && !j["injected_position"].is_null())
        rec.injected_position = j["injected_position"].get<std::size_t>();
      rec.injected_detail = detail::opt_string(j, "injected_detail");
    } catch (const nlohmann::json::exception& e) {
      out.errors.push_back({lineno, e.what()});
      continue;
    }

    // Invariant checks; failures quarantine the record with a reason.
    try {
      const TokenSeq gold = tokenize(rec.gold, opts);
      if (!check_validity(gold).schema_valid) {
        out.quarantine.push_back({lineno, "gold frame is not schema-valid"});
        continue;
      }
      const TokenSeq pred = tokenize(rec.pred, opts);
      if (rec.token_probs) {
        if (rec.token_probs->size() != pred.size()) {
          out.quarantine.push_back(
              {lineno, "token_probs length " +
                           std::to_string(rec.token_probs->size()) +
                           " does not match " + std::to_string(pred.size()) +
                           " predicted tokens"});
          continue;
        }
        bool in_range = true;
        for (double p : *rec.token_probs)
          if (!(p > 0.0 && p <= 1.0)) in_range = false;
        if (!in_range) {
          out.quarantine.push_back({lineno, "token_probs outside (0,1]"});
          continue;
        }
      }
      if (rec.forced_pred) tokenize(*rec.forced_pred, opts);
    } catch (const Error& e) {
      out.quarantine.push_back({lineno, e.what()});
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  if (!any_content) throw EmptyDataset(path);
  return out;
}

// ============================================================================
// Writers
// ============================================================================

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw UnreadableFile(path);
  outf << content;
  if (!outf) throw Error("failed writing " + path);
}

inline std::string to_jsonl(const std::vector<PredictionRecord>& records) {
  std::string text;
  for (const PredictionRecord& r : records) {
    text += to_json(r).dump();
    text += '\n';
  }
  return text;
}

// Oracle pairs as TSV ("source TAB target") or JSONL with the snippet kept.
inline std::string to_tsv(const std::vector<OraclePair>& pairs) {
  std::string text;
  for (const OraclePair& p : pairs) {
    text += p.source;
    text += '\t';
    text += p.target;
    text += '\n';
  }
  return text;
}

inline std::string to_jsonl(const std::vector<OraclePair>& pairs) {
  std::string text;
  for (const OraclePair& p : pairs) {
    nlohmann::json j;
    j["source"] = p.source;
    j["target"] = p.target;
    j["kind"] = to_string(p.kind);
    j["snippet"] = p.snippet;
    text += j.dump();
    text += '\n';
  }
  return text;
}

}  // namespace frameprobe
