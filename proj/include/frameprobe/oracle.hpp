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

// Span-oracle and structure-oracle pair construction.
//
// Both oracles condition a seq2seq model on a partially gold snippet z next
// to the utterance. The span oracle's z lists the gold leaf spans behind
// numbered markers ("[span1] fireworks [span2] tonight"); the structure
// oracle's z is the full frame with each leaf span replaced by its marker
// ("[IN:GET_EVENT [SL:CAT [span1] ] [SL:DATE [span2] ] ]"), labels kept.
// The target is always the full frame.
//
// Source text is "<utterance> [sep] <snippet>"; the reserved "[sep]" token
// keeps the utterance/snippet boundary recoverable. Markers are written
// "[spanK]" with brackets; the frame tokenizer lexes them as opaque copy
// tokens, so they only carry meaning in snippet context. Utterances whose
// words themselves match the marker pattern are not supported in structure
// snippets (reconstruct would reject them with MarkerMismatch).

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"

namespace frameprobe {

inline constexpr const char* kOracleSeparator = "[sep]";

enum class OracleKind { SPAN, STRUCT };

inline const char* to_string(OracleKind k) {
  return k == OracleKind::SPAN ? "span" : "struct";
}

// One leaf span in left-to-right frame order, 1-based.
struct LeafSpan {
  std::size_t index = 0;
  std::vector<std::string> tokens;
  std::string slot_label;

  friend bool operator==(const LeafSpan&, const LeafSpan&) = default;
};

struct OraclePair {
  OracleKind kind = OracleKind::SPAN;
  std::string source;   // utterance + " [sep]" (+ " " + snippet if non-empty)
  std::string target;   // canonical frame text
  std::string snippet;  // z alone
};

inline std::string marker(std::size_t index) {
  return "[span" + std::to_string(index) + "]";
}

// Parses "[spanK]" into K; nullopt for anything else.
inline std::optional<std::size_t> parse_marker(std::string_view unit) {
  if (!unit.starts_with("[span") || !unit.ends_with("]")) return std::nullopt;
  std::string_view digits = unit.substr(5, unit.size() - 6);
  if (digits.empty() || digits[0] == '0') return std::nullopt;
  std::size_t value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

namespace detail {

inline void collect_spans(const IntentNode& n, std::vector<LeafSpan>& out);

inline void collect_spans(const SlotNode& s, std::vector<LeafSpan>& out) {
  for (const IntentNode& c : s.children) collect_spans(c, out);
  if (!s.leaf_span.empty())
    out.push_back(LeafSpan{out.size() + 1, s.leaf_span, s.label});
}

inline void collect_spans(const IntentNode& n, std::vector<LeafSpan>& out) {
  for (const SlotNode& c : n.children) collect_spans(c, out);
}

inline void join_word(std::string& text, std::string_view word) {
  if (!text.empty()) text += ' ';
  text += word;
}

inline std::string make_source(std::string_view utterance,
                               std::string_view snippet) {
  std::string source(utterance);
  join_word(source, kOracleSeparator);
  if (!snippet.empty()) join_word(source, snippet);
  return source;
}

// Structure snippet: serialize the tree, swapping each non-empty leaf span
// for its marker. Marker numbering follows extract_leaf_spans order.
inline void emit_struct_snippet(const IntentNode& n, std::size_t& next,
                                std::string& out);

inline void emit_struct_snippet(const SlotNode& s, std::size_t& next,
                                std::string& out) {
  join_word(out, "[SL:" + s.label);
  for (const IntentNode& c : s.children) emit_struct_snippet(c, next, out);
  if (!s.leaf_span.empty()) join_word(out, marker(next++));
  join_word(out, "]");
}

inline void emit_struct_snippet(const IntentNode& n, std::size_t& next,
                                std::string& out) {
  join_word(out, "[IN:" + n.label);
  for (const SlotNode& c : n.children) emit_struct_snippet(c, next, out);
  join_word(out, "]");
}

}  // namespace detail

// Leaf spans in serialization order; slots with empty spans are skipped, so
// indices run 1..N consecutively.
inline std::vector<LeafSpan> extract_leaf_spans(const FrameTree& tree) {
  std::vector<LeafSpan> out;
  detail::collect_spans(tree.root, out);
  return out;
}

// z = "[span1] <span 1 tokens> [span2] <span 2 tokens> ...".
inline OraclePair build_span_oracle(std::string_view utterance,
                                    const TokenSeq& frame) {
  const FrameTree tree = parse(frame);  // throws NotSchemaValid
  std::string snippet;
  for (const LeafSpan& span : extract_leaf_spans(tree)) {
    detail::join_word(snippet, marker(span.index));
    for (const std::string& w : span.tokens) detail::join_word(snippet, w);
  }
  return OraclePair{OracleKind::SPAN, detail::make_source(utterance, snippet),
                    serialize(tree), snippet};
}

// z = frame text with each leaf span replaced by its marker.
inline OraclePair build_struct_oracle(std::string_view utterance,
                                      const TokenSeq& frame) {
  const FrameTree tree = parse(frame);  // throws NotSchemaValid
  std::string snippet;
  std::size_t next = 1;
  detail::emit_struct_snippet(tree.root, next, snippet);
  return OraclePair{OracleKind::STRUCT,
                    detail::make_source(utterance, snippet), serialize(tree),
                    snippet};
}

// Inverse of build_struct_oracle: substitutes span tokens back for their
// markers. Requires every marker 1..|spans| to appear exactly once; throws
// MarkerMismatch otherwise.
inline TokenSeq reconstruct(std::string_view struct_snippet,
                            const std::vector<LeafSpan>& spans,
                            TokenizeOptions opts = {}) {
  std::vector<bool> seen(spans.size(), false);
  std::string text;
  for (std::string_view unit : detail::split_ws(struct_snippet)) {
    const std::optional<std::size_t> k = parse_marker(unit);
    if (!k) {
      detail::join_word(text, unit);
      continue;
    }
    if (*k < 1 || *k > spans.size())
      throw MarkerMismatch("marker " + std::string(unit) +
                           " out of range 1.." + std::to_string(spans.size()));
    if (seen[*k - 1])
      throw MarkerMismatch("marker " + std::string(unit) + " appears twice");
    seen[*k - 1] = true;
    for (const std::string& w : spans[*k - 1].tokens)
      detail::join_word(text, w);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i])
      throw MarkerMismatch("marker " + marker(i + 1) + " missing from snippet");
  }
  return tokenize(text, opts);
}

}  // namespace frameprobe
