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

// Report assembly and rendering. A Report is a small typed table plus
// metadata naming the conventions behind the numbers (depth rule, exact
// match rule, divergence source), so emitted files are interpretable on
// their own. The same cells feed both the JSON and the markdown renderer;
// percentages are rounded to two decimals once, before rendering, so the
// two outputs always carry identical values. Raw counts ride along so
// rounding never hides data.

#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frameprobe/confidence.hpp"
#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/records.hpp"
#include "frameprobe/taxonomy.hpp"
#include "frameprobe/version.hpp"

#include <json.hpp>

namespace frameprobe {

enum class ReportKind { EM_TV_BY_DEPTH, ERROR_DISTRIBUTION, CE_RESULTS };

inline const char* to_string(ReportKind k) {
  switch (k) {
    case ReportKind::EM_TV_BY_DEPTH: return "em_tv_by_depth";
    case ReportKind::ERROR_DISTRIBUTION: return "error_distribution";
    case ReportKind::CE_RESULTS: return "ce_results";
  }
  return "?";
}

// A cell is text, an integer count, a two-decimal percentage, or absent
// (rendered as null / "-").
using Cell = std::variant<std::monostate, std::string, long, double>;

struct Report {
  ReportKind kind = ReportKind::EM_TV_BY_DEPTH;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Conventions stamped into every report so the numbers are self-describing.
inline std::map<std::string, std::string> base_metadata() {
  return {
      {"tool_version", kVersion},
      {"depth_rule",
       "depth counts intent and slot nesting levels; a bare intent has "
       "depth 1"},
      {"em_rule", "token-level equality after whitespace normalization"},
      {"tv_rule", "bracket balance of the predicted frame"},
  };
}

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

inline double percent(long part, long whole) {
  return round2(100.0 * static_cast<double>(part) /
                static_cast<double>(whole));
}

// ============================================================================
// Builders
// ============================================================================

// Exact match and tree validity bucketed by gold depth, rows d = 1..max.
// Empty rows keep their count of zero and carry absent percentages.
inline Report report_em_tv_by_depth(
    const std::vector<PredictionRecord>& records, TokenizeOptions opts = {}) {
  struct Acc {
    long count = 0;
    long em = 0;
    long tv = 0;
  };
  std::map<int, Acc> buckets;
  int max_depth = 0;
  for (const PredictionRecord& rec : records) {
    const TokenSeq gold = tokenize(rec.gold, opts);
    const ValidityReport gv = check_validity(gold);
    if (!gv.schema_valid)
      throw Error("gold frame is not schema-valid; records must be loaded "
                  "through load_predictions");
    const TokenSeq pred = tokenize(rec.pred, opts);
    Acc& acc = buckets[*gv.depth];
    max_depth = std::max(max_depth, *gv.depth);
    ++acc.count;
    if (exact_match(pred, gold)) ++acc.em;
    if (check_validity(pred).balanced) ++acc.tv;
  }

  Report rep;
  rep.kind = ReportKind::EM_TV_BY_DEPTH;
  rep.metadata = base_metadata();
  rep.metadata["records"] = std::to_string(records.size());
  rep.columns = {"d", "count", "em", "tv"};
  for (int d = 1; d <= max_depth; ++d) {
    const Acc acc = buckets.count(d) ? buckets[d] : Acc{};
    std::vector<Cell> row;
    row.emplace_back(static_cast<long>(d));
    row.emplace_back(acc.count);
    if (acc.count > 0) {
      row.emplace_back(percent(acc.em, acc.count));
      row.emplace_back(percent(acc.tv, acc.count));
    } else {
      row.emplace_back(std::monostate{});
      row.emplace_back(std::monostate{});
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// Error distribution per bucket: percentage per error type plus the
// tree-validity rate of the incorrect predictions.
inline Report report_error_distribution(
    const std::vector<ErrorDistribution>& dists, BucketBy bucket_by,
    bool any_forced) {
  Report rep;
  rep.kind = ReportKind::ERROR_DISTRIBUTION;
  rep.metadata = base_metadata();
  rep.metadata["bucket_by"] = to_string(bucket_by);
  rep.metadata["divergence_source"] =
      any_forced ? "forced where available, else free-running prefix"
                 : "free-running prefix";
  rep.columns = {"bucket", "errors", "in", "sl", "od", "md", "lf", "validity"};
  for (const ErrorDistribution& d : dists) {
    std::vector<Cell> row;
    row.emplace_back(d.bucket);
    row.emplace_back(d.total);
    for (ErrorType t : kAllErrorTypes) {
      if (d.total > 0)
        row.emplace_back(percent(d.count(t), d.total));
      else
        row.emplace_back(std::monostate{});
    }
    if (d.tree_validity_rate)
      row.emplace_back(round2(*d.tree_validity_rate * 100.0));
    else
      row.emplace_back(std::monostate{});
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// Confidence-estimator results, one row per model variant.
inline Report report_ce_results(const std::vector<AblationRow>& rows) {
  Report rep;
  rep.kind = ReportKind::CE_RESULTS;
  rep.metadata = base_metadata();
  rep.metadata["positive_class"] = "correct frames (exact match)";
  rep.columns = {"variant", "p", "r", "f1", "tp", "fp", "fn", "tn"};
  for (const AblationRow& row : rows) {
    std::vector<Cell> cells;
    cells.emplace_back(row.name);
    cells.emplace_back(round2(row.prf.precision * 100.0));
    cells.emplace_back(round2(row.prf.recall * 100.0));
    cells.emplace_back(round2(row.prf.f1 * 100.0));
    cells.emplace_back(row.prf.tp);
    cells.emplace_back(row.prf.fp);
    cells.emplace_back(row.prf.fn);
    cells.emplace_back(row.prf.tn);
    rep.rows.push_back(std::move(cells));
  }
  return rep;
}

inline Report report_ce_results(const PRF& prf, const std::string& name) {
  return report_ce_results(std::vector<AblationRow>{{name, prf}});
}

// ============================================================================
// Rendering
// ============================================================================

namespace detail {

inline std::string format_cell(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "-";
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* n = std::get_if<long>(&c)) return std::to_string(*n);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", std::get<double>(c));
  return buf;
}

inline nlohmann::json cell_json(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return nullptr;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* n = std::get_if<long>(&c)) return *n;
  return std::get<double>(c);
}

}  // namespace detail

inline nlohmann::json to_json(const Report& rep) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = to_string(rep.kind);
  j["metadata"] = rep.metadata;
  j["columns"] = rep.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rep.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& c : row) r.push_back(detail::cell_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string to_markdown(const Report& rep) {
  std::string md;
  md += "| ";
  for (std::size_t i = 0; i < rep.columns.size(); ++i) {
    if (i) md += " | ";
    md += rep.columns[i];
  }
  md += " |\n|";
  for (std::size_t i = 0; i < rep.columns.size(); ++i) md += "---|";
  md += "\n";
  for (const auto& row : rep.rows) {
    md += "| ";
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) md += " | ";
      md += detail::format_cell(row[i]);
    }
    md += " |\n";
  }
  return md;
}

}  // namespace frameprobe
