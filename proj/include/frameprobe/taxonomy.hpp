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

// First-error location and five-way classification for predicted frames.
//
// Only the first error in a sequence is counted. When a teacher-forced
// decode is available the divergence is the first position where it departs
// from gold (every earlier token was forced to gold, so the error is not
// contaminated by upstream mistakes). Without one, the first free-running
// mismatch after the longest common prefix is used instead; the two sources
// are labeled so downstream reports can tell them apart.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/records.hpp"

namespace frameprobe {

// ============================================================================
// Types
// ============================================================================

enum class ErrorType { INTENT, SLOT, OOD, MODE, LEAF };

inline constexpr std::array<ErrorType, 5> kAllErrorTypes = {
    ErrorType::INTENT, ErrorType::SLOT, ErrorType::OOD, ErrorType::MODE,
    ErrorType::LEAF};

inline const char* to_string(ErrorType t) {
  switch (t) {
    case ErrorType::INTENT: return "intent";
    case ErrorType::SLOT: return "slot";
    case ErrorType::OOD: return "ood";
    case ErrorType::MODE: return "mode";
    case ErrorType::LEAF: return "leaf";
  }
  return "?";
}

// Short column keys used in distribution tables.
inline const char* short_key(ErrorType t) {
  switch (t) {
    case ErrorType::INTENT: return "in";
    case ErrorType::SLOT: return "sl";
    case ErrorType::OOD: return "od";
    case ErrorType::MODE: return "md";
    case ErrorType::LEAF: return "lf";
  }
  return "?";
}

inline std::optional<ErrorType> parse_error_type(std::string_view s) {
  for (ErrorType t : kAllErrorTypes)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

enum class DivergenceSource { FORCED, FREE_RUNNING_PREFIX };

inline const char* to_string(DivergenceSource s) {
  return s == DivergenceSource::FORCED ? "forced" : "free_running_prefix";
}

// First position where prediction and gold part ways. A disengaged optional
// token means that side ended early; premature stop on either side is a
// divergence against a synthetic end-of-sequence and classifies as MODE.
struct Divergence {
  std::size_t position = 0;
  std::optional<FrameToken> gold_token;
  std::optional<FrameToken> pred_token;
  DivergenceSource source = DivergenceSource::FREE_RUNNING_PREFIX;
};

// Out-of-domain intent labels. The prefix rule covers the whole
// UNSUPPORTED family (UNSUPPORTED, UNSUPPORTED_EVENT, ...) without
// enumerating it; extra labels can be listed explicitly.
struct OodLabels {
  std::set<std::string> labels;
  bool unsupported_prefix_rule = true;

  bool contains(const std::string& label) const {
    if (labels.count(label)) return true;
    return unsupported_prefix_rule && label.starts_with("UNSUPPORTED");
  }
};

// ============================================================================
// Operations
// ============================================================================

// First index where the prediction departs from gold, or nullopt on exact
// match. When `forced` is supplied the comparison runs on it instead of
// `pred` and the result is tagged FORCED.
inline std::optional<Divergence> first_divergence(
    const TokenSeq& pred, const TokenSeq& gold,
    const std::optional<TokenSeq>& forced = std::nullopt) {
  const TokenSeq& cmp = forced ? *forced : pred;
  const DivergenceSource src = forced ? DivergenceSource::FORCED
                                      : DivergenceSource::FREE_RUNNING_PREFIX;

  const std::size_t common = std::min(cmp.size(), gold.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (!(cmp[i] == gold[i])) {
      return Divergence{i, gold[i], cmp[i], src};
    }
  }
  if (cmp.size() == gold.size()) return std::nullopt;

  Divergence d;
  d.position = common;
  d.source = src;
  if (common < gold.size()) d.gold_token = gold[common];
  if (common < cmp.size()) d.pred_token = cmp[common];
  return d;
}

// Five-way classification, first rule wins:
//   1. OOD    at the root-intent position when exactly one side's root label
//             is an out-of-domain label
//   2. INTENT both open-intent, labels differ
//   3. SLOT   both open-slot, labels differ
//   4. LEAF   both copy, text differs
//   5. MODE   everything else: any cross-kind confusion, close-vs-open,
//             copy-vs-generate, and premature stop on either side
inline ErrorType classify_error(const Divergence& div,
                                const std::string& gold_root_label,
                                const std::optional<std::string>& pred_root_label,
                                const OodLabels& ood = {}) {
  if (div.position == 0) {
    const bool gold_ood = ood.contains(gold_root_label);
    const bool pred_ood = pred_root_label && ood.contains(*pred_root_label);
    if (gold_ood != pred_ood) return ErrorType::OOD;
  }
  if (div.gold_token && div.pred_token &&
      div.gold_token->kind == div.pred_token->kind) {
    switch (div.gold_token->kind) {
      case TokenKind::OPEN_INTENT: return ErrorType::INTENT;
      case TokenKind::OPEN_SLOT: return ErrorType::SLOT;
      case TokenKind::COPY: return ErrorType::LEAF;
      case TokenKind::CLOSE: break;  // equal tokens never diverge
    }
  }
  return ErrorType::MODE;
}

// Root label of a sequence when its first token is an open intent.
inline std::optional<std::string> root_intent_label(const TokenSeq& seq) {
  if (!seq.empty() && seq.front().kind == TokenKind::OPEN_INTENT)
    return seq.front().label;
  return std::nullopt;
}

// ============================================================================
// Aggregation
// ============================================================================

enum class BucketBy { LANGUAGE, DOMAIN, DEPTH };

inline const char* to_string(BucketBy b) {
  switch (b) {
    case BucketBy::LANGUAGE: return "language";
    case BucketBy::DOMAIN: return "domain";
    case BucketBy::DEPTH: return "depth";
  }
  return "?";
}

struct ErrorDistribution {
  std::string bucket;
  std::array<long, 5> counts{};  // indexed by ErrorType order
  long total = 0;                // classified errors; counts sum to this
  long unclassified = 0;         // non-exact-match but no divergence
                                 // (forced decode equal to gold)
  std::optional<double> tree_validity_rate;  // balanced fraction among the
                                             // incorrect predictions

  long count(ErrorType t) const { return counts[static_cast<std::size_t>(t)]; }
};

struct AggregateOptions {
  BucketBy bucket_by = BucketBy::DEPTH;
  OodLabels ood;
  TokenizeOptions tokenize;
};

// Folds non-exact-match records into per-bucket error distributions.
// Exact matches contribute nothing. The validity rate is computed over the
// same incorrect records with the balanced criterion on the prediction.
// Buckets come out in deterministic order: numeric for depth, lexicographic
// for language/domain. Throws MissingBucketKey when a record lacks the
// requested tag; records are otherwise assumed to have been validated at
// load time (gold schema-valid, pred tokenizable).
inline std::vector<ErrorDistribution> aggregate(
    const std::vector<PredictionRecord>& records, const AggregateOptions& opts) {
  struct Acc {
    std::array<long, 5> counts{};
    long classified = 0;
    long unclassified = 0;
    long incorrect = 0;
    long balanced = 0;
  };
  std::map<int, Acc> by_depth;
  std::map<std::string, Acc> by_tag;

  for (std::size_t ri = 0; ri < records.size(); ++ri) {
    const PredictionRecord& rec = records[ri];
    const TokenSeq gold = tokenize(rec.gold, opts.tokenize);
    const TokenSeq pred = tokenize(rec.pred, opts.tokenize);
    if (exact_match(pred, gold)) continue;

    Acc* acc = nullptr;
    if (opts.bucket_by == BucketBy::DEPTH) {
      const ValidityReport v = check_validity(gold);
      if (!v.schema_valid)
        throw MissingBucketKey("record " + std::to_string(ri) +
                               ": gold frame is not schema-valid, depth "
                               "bucket unavailable");
      acc = &by_depth[*v.depth];
    } else {
      const std::optional<std::string>& tag =
          opts.bucket_by == BucketBy::LANGUAGE ? rec.language : rec.domain;
      if (!tag)
        throw MissingBucketKey("record " + std::to_string(ri) + ": missing " +
                               std::string(to_string(opts.bucket_by)) +
                               " tag");
      acc = &by_tag[*tag];
    }

    ++acc->incorrect;
    if (check_validity(pred).balanced) ++acc->balanced;

    std::optional<TokenSeq> forced;
    if (rec.forced_pred) forced = tokenize(*rec.forced_pred, opts.tokenize);
    const std::optional<Divergence> div = first_divergence(pred, gold, forced);
    if (!div) {
      ++acc->unclassified;  // forced decode matched gold exactly
      continue;
    }
    const ErrorType et = classify_error(*div, gold.front().label,
                                        root_intent_label(pred), opts.ood);
    ++acc->counts[static_cast<std::size_t>(et)];
    ++acc->classified;
  }

  std::vector<ErrorDistribution> out;
  auto emit = [&out](std::string key, const Acc& a) {
    ErrorDistribution d;
    d.bucket = std::move(key);
    d.counts = a.counts;
    d.total = a.classified;
    d.unclassified = a.unclassified;
    if (a.incorrect > 0)
      d.tree_validity_rate =
          static_cast<double>(a.balanced) / static_cast<double>(a.incorrect);
    out.push_back(std::move(d));
  };
  for (const auto& [k, a] : by_depth) emit(std::to_string(k), a);
  for (const auto& [k, a] : by_tag) emit(k, a);
  return out;
}

}  // namespace frameprobe
