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

// Controlled single-error injection into gold frames, plus synthetic
// per-token probabilities. Together they produce labeled desk-scale corpora
// whose ground truth is known by construction, which is what the taxonomy
// and confidence tests run on.
//
// Every injection is exactly one token edit (substitution or deletion):
//   INTENT  swap an intent label for another from the ontology
//   SLOT    swap a slot label
//   LEAF    drop the first token of a multi-token leaf span, or double the
//           text of a single-token span (duplicated-subword style)
//   MODE    replace a close bracket with a copy token, a copy token with a
//           close bracket, or delete a close bracket outright
//   OOD     swap the root label between in-domain and out-of-domain
//
// Randomness comes from SplitMix64 on the spec seed only; identical inputs
// give identical outputs on every platform. Label substitutions take the
// lexicographically smallest admissible alternative so the edit itself adds
// no seeding ambiguity.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/rng.hpp"
#include "frameprobe/taxonomy.hpp"

namespace frameprobe {

// ============================================================================
// Types
// ============================================================================

struct Ontology {
  std::set<std::string> intent_labels;
  std::set<std::string> slot_labels;
  std::set<std::string> ood_labels;  // subset of intent_labels

  OodLabels ood() const { return OodLabels{ood_labels, true}; }
};

struct ProbProfile {
  double correct_mean = 0.9;
  double incorrect_mean = 0.6;
  double jitter = 0.05;
};

struct PerturbationSpec {
  ErrorType error_type = ErrorType::MODE;
  std::uint64_t seed = 0;
  ProbProfile prob_profile;

  // Means in (0,1), incorrect below correct, and jitter small enough that
  // every drawn probability stays inside (0,1).
  void validate() const {
    const ProbProfile& p = prob_profile;
    if (!(p.correct_mean > 0.0 && p.correct_mean < 1.0) ||
        !(p.incorrect_mean > 0.0 && p.incorrect_mean < 1.0))
      throw Error("prob profile means must lie in (0,1)");
    if (!(p.incorrect_mean < p.correct_mean))
      throw Error("incorrect_mean must be below correct_mean");
    if (p.jitter < 0.0 ||
        p.jitter >= std::min(p.incorrect_mean, 1.0 - p.correct_mean))
      throw Error("jitter must satisfy 0 <= jitter < min(incorrect_mean, "
                  "1 - correct_mean)");
  }
};

// Names the concrete edit so corpora can be sliced finer than the five-way
// type (the delete-close subset of MODE is the one that breaks balance).
enum class EditDetail {
  INTENT_SWAP,
  SLOT_SWAP,
  LEAF_DROP_FIRST,
  LEAF_SUBSTITUTE,
  MODE_CLOSE_TO_COPY,
  MODE_COPY_TO_CLOSE,
  MODE_DELETE_CLOSE,
  OOD_ROOT_SWAP,
};

inline const char* to_string(EditDetail d) {
  switch (d) {
    case EditDetail::INTENT_SWAP: return "intent_swap";
    case EditDetail::SLOT_SWAP: return "slot_swap";
    case EditDetail::LEAF_DROP_FIRST: return "leaf_drop_first";
    case EditDetail::LEAF_SUBSTITUTE: return "leaf_substitute";
    case EditDetail::MODE_CLOSE_TO_COPY: return "mode_close_to_copy";
    case EditDetail::MODE_COPY_TO_CLOSE: return "mode_copy_to_close";
    case EditDetail::MODE_DELETE_CLOSE: return "mode_delete_close";
    case EditDetail::OOD_ROOT_SWAP: return "ood_root_swap";
  }
  return "?";
}

struct Perturbed {
  TokenSeq tokens;
  std::size_t position = 0;  // first index where output differs from input
  EditDetail detail = EditDetail::MODE_DELETE_CLOSE;
};

// ============================================================================
// Ontology scanning
// ============================================================================

// Unions all labels in the corpus; out-of-domain labels are the ones the
// UNSUPPORTED prefix rule matches. Throws EmptyCorpus on an empty span.
inline Ontology scan_ontology(const std::vector<TokenSeq>& frames) {
  if (frames.empty()) throw EmptyCorpus();
  Ontology onto;
  const OodLabels prefix_rule;
  for (const TokenSeq& f : frames) {
    for (const FrameToken& t : f) {
      if (t.kind == TokenKind::OPEN_INTENT) {
        onto.intent_labels.insert(t.label);
        if (prefix_rule.contains(t.label)) onto.ood_labels.insert(t.label);
      } else if (t.kind == TokenKind::OPEN_SLOT) {
        onto.slot_labels.insert(t.label);
      }
    }
  }
  return onto;
}

// ============================================================================
// Injection
// ============================================================================

namespace detail {

// Smallest label in `pool` different from `current` and passing `admit`.
template <typename Pred>
inline std::optional<std::string> smallest_alternative(
    const std::set<std::string>& pool, const std::string& current,
    Pred admit) {
  for (const std::string& cand : pool) {
    if (cand != current && admit(cand)) return cand;
  }
  return std::nullopt;
}

inline std::size_t first_difference(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!(a[i] == b[i])) return i;
  return n;
}

}  // namespace detail

// Applies one edit of spec.error_type to a schema-valid frame. Throws
// TypeNotApplicable when the frame cannot host the requested type (no slot,
// no leaf span, no alternative label...); callers skip such records.
inline Perturbed perturb(const TokenSeq& frame, const PerturbationSpec& spec,
                         const Ontology& ontology) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const OodLabels ood = ontology.ood();

  TokenSeq out = frame;
  EditDetail detail_code;

  switch (spec.error_type) {
    case ErrorType::INTENT: {
      // Candidate positions: intent tokens with an admissible alternative.
      // At the root the replacement must keep the same ood status, otherwise
      // the edit would read as an OOD confusion instead.
      std::vector<std::pair<std::size_t, std::string>> cands;
      for (std::size_t i = 0; i < frame.size(); ++i) {
        if (frame[i].kind != TokenKind::OPEN_INTENT) continue;
        const std::string& cur = frame[i].label;
        auto admit = [&](const std::string& cand) {
          return i != 0 || ood.contains(cand) == ood.contains(cur);
        };
        if (auto alt = detail::smallest_alternative(ontology.intent_labels,
                                                    cur, admit))
          cands.emplace_back(i, *alt);
      }
      if (cands.empty())
        throw TypeNotApplicable("no intent position admits a label swap");
      const auto& [pos, alt] = cands[rng.next_below(cands.size())];
      out[pos] = FrameToken::open_intent(alt);
      detail_code = EditDetail::INTENT_SWAP;
      break;
    }
    case ErrorType::SLOT: {
      std::vector<std::size_t> positions;
      for (std::size_t i = 0; i < frame.size(); ++i)
        if (frame[i].kind == TokenKind::OPEN_SLOT) positions.push_back(i);
      if (positions.empty()) throw TypeNotApplicable("frame has no slots");
      const std::size_t pos = positions[rng.next_below(positions.size())];
      const auto alt = detail::smallest_alternative(
          ontology.slot_labels, frame[pos].label,
          [](const std::string&) { return true; });
      if (!alt) throw TypeNotApplicable("no alternative slot label");
      out[pos] = FrameToken::open_slot(*alt);
      detail_code = EditDetail::SLOT_SWAP;
      break;
    }
    case ErrorType::LEAF: {
      // Runs of copy tokens; each run is one leaf span.
      std::vector<std::pair<std::size_t, std::size_t>> runs;  // start, len
      for (std::size_t i = 0; i < frame.size();) {
        if (frame[i].kind == TokenKind::COPY) {
          std::size_t j = i;
          while (j < frame.size() && frame[j].kind == TokenKind::COPY) ++j;
          runs.emplace_back(i, j - i);
          i = j;
        } else {
          ++i;
        }
      }
      if (runs.empty())
        throw TypeNotApplicable("frame has no non-empty leaf span");
      const auto& [start, len] = runs[rng.next_below(runs.size())];
      // Dropping the first word only reads as a leaf error when the next
      // word differs; a span like "on on" would shift the mismatch onto the
      // close bracket. Those spans get the duplicated-text substitution.
      if (len >= 2 && frame[start].text != frame[start + 1].text) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(start));
        detail_code = EditDetail::LEAF_DROP_FIRST;
      } else {
        out[start] = FrameToken::copy(frame[start].text + frame[start].text);
        detail_code = EditDetail::LEAF_SUBSTITUTE;
      }
      break;
    }
    case ErrorType::MODE: {
      std::vector<std::size_t> closes;
      std::vector<std::size_t> copies;
      std::string smallest_copy;
      for (std::size_t i = 0; i < frame.size(); ++i) {
        if (frame[i].kind == TokenKind::CLOSE) closes.push_back(i);
        if (frame[i].kind == TokenKind::COPY) {
          copies.push_back(i);
          if (smallest_copy.empty() || frame[i].text < smallest_copy)
            smallest_copy = frame[i].text;
        }
      }
      // Schema-valid frames always have closes, so MODE always applies;
      // the copy-to-close variant additionally needs a copy token.
      const int variants = copies.empty() ? 2 : 3;
      switch (rng.next_below(static_cast<std::uint64_t>(variants))) {
        case 0: {
          const std::size_t pos = closes[rng.next_below(closes.size())];
          out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
          detail_code = EditDetail::MODE_DELETE_CLOSE;
          break;
        }
        case 1: {
          const std::size_t pos = closes[rng.next_below(closes.size())];
          out[pos] = FrameToken::copy(
              smallest_copy.empty() ? std::string("x") : smallest_copy);
          detail_code = EditDetail::MODE_CLOSE_TO_COPY;
          break;
        }
        default: {
          const std::size_t pos = copies[rng.next_below(copies.size())];
          out[pos] = FrameToken::close();
          detail_code = EditDetail::MODE_COPY_TO_CLOSE;
          break;
        }
      }
      break;
    }
    case ErrorType::OOD: {
      if (frame.empty() || frame[0].kind != TokenKind::OPEN_INTENT)
        throw TypeNotApplicable("frame has no root intent");
      const std::string& root = frame[0].label;
      const bool root_is_ood = ood.contains(root);
      std::optional<std::string> alt;
      if (root_is_ood) {
        alt = detail::smallest_alternative(
            ontology.intent_labels, root,
            [&](const std::string& c) { return !ood.contains(c); });
      } else {
        alt = detail::smallest_alternative(
            ontology.ood_labels, root,
            [](const std::string&) { return true; });
      }
      if (!alt)
        throw TypeNotApplicable(root_is_ood
                                    ? "no in-domain intent label available"
                                    : "ontology has no ood labels");
      out[0] = FrameToken::open_intent(*alt);
      detail_code = EditDetail::OOD_ROOT_SWAP;
      break;
    }
    default:
      throw TypeNotApplicable("unknown error type");
  }

  const std::size_t position = detail::first_difference(frame, out);
  return Perturbed{std::move(out), position, detail_code};
}

// ============================================================================
// Synthetic probabilities
// ============================================================================

// One probability per token, uniform around the profile mean for the class.
// jitter == 0 degenerates to the exact mean. Deterministic in spec.seed.
inline std::vector<double> synth_probs(const TokenSeq& tokens, bool is_correct,
                                       const PerturbationSpec& spec) {
  spec.validate();
  if (tokens.empty()) throw Error("synth_probs requires a non-empty sequence");
  const double mean = is_correct ? spec.prob_profile.correct_mean
                                 : spec.prob_profile.incorrect_mean;
  SplitMix64 rng(spec.seed);
  std::vector<double> probs;
  probs.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double offset = (rng.next_unit() * 2.0 - 1.0) * spec.prob_profile.jitter;
    probs.push_back(mean + offset);
  }
  return probs;
}

// ============================================================================
// Corpus building
// ============================================================================

// One corpus entry: the utterance, its gold frame, and any bucket tags to
// carry through to the emitted records.
struct CorpusRow {
  std::string utterance;
  TokenSeq frame;
  std::optional<std::string> language;
  std::optional<std::string> domain;
};

struct CorpusOptions {
  // Empty = rotate through all five types by record index.
  std::optional<ErrorType> error_type;
  std::uint64_t seed = 0;
  ProbProfile prob_profile;
  // Fraction of records emitted unperturbed (pred == gold) with
  // correct-class probabilities; the rest carry one injected error.
  double correct_fraction = 0.0;
};

struct CorpusResult {
  std::vector<PredictionRecord> records;
  std::size_t skipped = 0;  // frames that could not host the requested type
};

// Builds a labeled synthetic corpus. Record i draws from seed XOR i, so the
// corpus is order-stable and can be produced in parallel. Frames where the
// requested type does not apply are skipped and counted.
inline CorpusResult make_corpus(const std::vector<CorpusRow>& dataset,
                                const CorpusOptions& opts) {
  CorpusResult result;
  const Ontology onto = [&] {
    std::vector<TokenSeq> frames;
    frames.reserve(dataset.size());
    for (const CorpusRow& row : dataset) frames.push_back(row.frame);
    return scan_ontology(frames);
  }();

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const CorpusRow& row = dataset[i];
    PerturbationSpec spec;
    spec.seed = opts.seed ^ static_cast<std::uint64_t>(i);
    spec.prob_profile = opts.prob_profile;
    spec.error_type =
        opts.error_type ? *opts.error_type : kAllErrorTypes[i % 5];

    SplitMix64 coin(spec.seed);
    const bool correct =
        opts.correct_fraction > 0.0 && coin.next_unit() < opts.correct_fraction;

    PredictionRecord rec;
    rec.utterance = row.utterance;
    rec.language = row.language;
    rec.domain = row.domain;
    rec.gold = serialize(row.frame);
    if (correct) {
      rec.pred = rec.gold;
      rec.token_probs = synth_probs(row.frame, true, spec);
    } else {
      Perturbed p;
      try {
        p = perturb(row.frame, spec, onto);
      } catch (const TypeNotApplicable&) {
        ++result.skipped;
        continue;
      }
      rec.pred = serialize(p.tokens);
      rec.token_probs = synth_probs(p.tokens, false, spec);
      rec.injected_type = to_string(spec.error_type);
      rec.injected_position = p.position;
      rec.injected_detail = to_string(p.detail);
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace frameprobe
