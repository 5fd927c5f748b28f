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

// Core types and operations for linearized decoupled semantic frames.
//
// Surface syntax (whitespace-separated tokens):
//   "[IN:LABEL"  opens an intent node
//   "[SL:LABEL"  opens a slot node
//   "]"          closes the innermost open node
//   anything else is a copy token (a surface word copied from the utterance)
//
// Two validity tiers are reported side by side:
//   balanced     bracket counts match and no prefix closes more than it opens
//   schema_valid the sequence builds a frame tree: a single intent root,
//                intents contain only slots, a slot holds either child
//                intents or a (possibly empty) run of copy tokens, never both
//
// Depth counts both intent and slot nesting levels; a bare intent has
// depth 1, so "[IN:X [SL:A a ] ]" has depth 2.
//
// Copy tokens are opaque byte strings compared exactly; no Unicode
// normalization or case folding is applied to them.
//
// All operations here are pure functions on immutable values and are safe
// to call concurrently.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frameprobe/errors.hpp"

namespace frameprobe {

// ============================================================================
// Tokens
// ============================================================================

enum class TokenKind { OPEN_INTENT, OPEN_SLOT, CLOSE, COPY };

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::OPEN_INTENT: return "open_intent";
    case TokenKind::OPEN_SLOT: return "open_slot";
    case TokenKind::CLOSE: return "close";
    case TokenKind::COPY: return "copy";
  }
  return "?";
}

// One token of a linearized frame. `label` is populated for the two open
// kinds, `text` for copy tokens, neither for CLOSE. Use the factories; they
// keep the kind/field pairing straight.
struct FrameToken {
  TokenKind kind = TokenKind::CLOSE;
  std::string label;  // ontology label, OPEN_INTENT / OPEN_SLOT only
  std::string text;   // surface token, COPY only

  static FrameToken open_intent(std::string label) {
    return {TokenKind::OPEN_INTENT, std::move(label), {}};
  }
  static FrameToken open_slot(std::string label) {
    return {TokenKind::OPEN_SLOT, std::move(label), {}};
  }
  static FrameToken close() { return {TokenKind::CLOSE, {}, {}}; }
  static FrameToken copy(std::string text) {
    return {TokenKind::COPY, {}, std::move(text)};
  }

  bool is_open() const {
    return kind == TokenKind::OPEN_INTENT || kind == TokenKind::OPEN_SLOT;
  }

  friend bool operator==(const FrameToken&, const FrameToken&) = default;
};

using TokenSeq = std::vector<FrameToken>;

// Canonical text form of a single token.
inline std::string to_text(const FrameToken& t) {
  switch (t.kind) {
    case TokenKind::OPEN_INTENT: return "[IN:" + t.label;
    case TokenKind::OPEN_SLOT: return "[SL:" + t.label;
    case TokenKind::CLOSE: return "]";
    case TokenKind::COPY: return t.text;
  }
  return {};
}

// Canonical text form: tokens joined by single spaces. tokenize() of the
// result reproduces the sequence exactly.
inline std::string serialize(const TokenSeq& seq) {
  std::string out;
  for (const FrameToken& t : seq) {
    if (!out.empty()) out += ' ';
    out += to_text(t);
  }
  return out;
}

// ============================================================================
// Tokenizer
// ============================================================================

struct TokenizeOptions {
  // Accept "[in:x" / "[sl:x" style open brackets and fold their labels to
  // upper case (ASCII only). Copy tokens are never folded.
  bool fold_case = false;
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

inline std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(s[i])) !=
        std::toupper(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

// Labels must be non-empty and free of whitespace and bracket characters.
// Whitespace is impossible after splitting; brackets are checked here.
inline bool valid_label(std::string_view label) {
  if (label.empty()) return false;
  return label.find_first_of("[]") == std::string_view::npos;
}

inline std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> units;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) units.push_back(text.substr(start, i - start));
  }
  return units;
}

}  // namespace detail

// Splits `text` on whitespace and lexes each unit into one FrameToken.
// Throws EmptyInput when the text is blank and MalformedBracketToken when an
// open bracket carries an empty label or a label containing brackets.
inline TokenSeq tokenize(std::string_view text, TokenizeOptions opts = {}) {
  const std::vector<std::string_view> units = detail::split_ws(text);
  if (units.empty()) throw EmptyInput();

  TokenSeq seq;
  seq.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::string_view u = units[i];
    const bool in = opts.fold_case ? detail::iequals_prefix(u, "[IN:")
                                   : u.starts_with("[IN:");
    const bool sl = !in && (opts.fold_case ? detail::iequals_prefix(u, "[SL:")
                                           : u.starts_with("[SL:"));
    if (in || sl) {
      std::string_view raw = u.substr(4);
      if (!detail::valid_label(raw)) throw MalformedBracketToken(i, std::string(u));
      std::string label =
          opts.fold_case ? detail::ascii_upper(raw) : std::string(raw);
      seq.push_back(in ? FrameToken::open_intent(std::move(label))
                       : FrameToken::open_slot(std::move(label)));
    } else if (u == "]") {
      seq.push_back(FrameToken::close());
    } else {
      seq.push_back(FrameToken::copy(std::string(u)));
    }
  }
  return seq;
}

// ============================================================================
// Validity
// ============================================================================

// Incremental bracket-balance state. check_validity() is a fold of feed()
// over the sequence; streaming callers can drive it token by token.
struct BalanceCounter {
  int open_count = 0;
  int close_count = 0;
  bool prefix_legal = true;  // no prefix has more closes than opens

  void feed(const FrameToken& t) {
    switch (t.kind) {
      case TokenKind::OPEN_INTENT:
      case TokenKind::OPEN_SLOT:
        ++open_count;
        break;
      case TokenKind::CLOSE:
        ++close_count;
        if (close_count > open_count) prefix_legal = false;
        break;
      case TokenKind::COPY:
        break;
    }
  }

  bool balanced() const { return prefix_legal && open_count == close_count; }
};

struct ValidityReport {
  int open_count = 0;
  int close_count = 0;
  bool balanced = false;
  bool prefix_legal = false;
  bool schema_valid = false;
  std::optional<int> depth;  // populated iff schema_valid
};

namespace detail {

// Single left-to-right pass enforcing the frame tree schema. Returns the
// depth on success; on failure reports the first offending token index
// (seq.size() when the sequence ends with nodes still open) and a reason.
struct SchemaScan {
  bool valid = false;
  std::size_t fail_index = 0;
  std::string reason;
  int depth = 0;
};

inline SchemaScan schema_scan(const TokenSeq& seq) {
  SchemaScan r;
  if (seq.empty()) {
    r.fail_index = 0;
    r.reason = "empty sequence";
    return r;
  }

  // Stack entry per open node; slots track what they contain so copy tokens
  // and child intents cannot mix.
  struct Open {
    bool is_slot = false;
    bool has_copies = false;
    bool has_intents = false;
  };
  std::vector<Open> stack;
  int max_depth = 0;

  for (std::size_t i = 0; i < seq.size(); ++i) {
    const FrameToken& t = seq[i];
    switch (t.kind) {
      case TokenKind::OPEN_INTENT: {
        if (i == 0) {
          stack.push_back({false, false, false});
        } else if (stack.empty()) {
          r.fail_index = i;
          r.reason = "token after the root closed";
          return r;
        } else if (!stack.back().is_slot) {
          r.fail_index = i;
          r.reason = "intent directly under an intent";
          return r;
        } else if (stack.back().has_copies) {
          r.fail_index = i;
          r.reason = "slot mixes copy tokens and child intents";
          return r;
        } else {
          stack.back().has_intents = true;
          stack.push_back({false, false, false});
        }
        break;
      }
      case TokenKind::OPEN_SLOT: {
        if (stack.empty()) {
          r.fail_index = i;
          r.reason = i == 0 ? "root must be an intent"
                            : "token after the root closed";
          return r;
        }
        if (stack.back().is_slot) {
          r.fail_index = i;
          r.reason = "slot directly under a slot";
          return r;
        }
        stack.push_back({true, false, false});
        break;
      }
      case TokenKind::COPY: {
        if (stack.empty() || !stack.back().is_slot) {
          r.fail_index = i;
          r.reason = stack.empty() ? (i == 0 ? "root must be an intent"
                                             : "token after the root closed")
                                   : "copy token directly under an intent";
          return r;
        }
        if (stack.back().has_intents) {
          r.fail_index = i;
          r.reason = "slot mixes child intents and copy tokens";
          return r;
        }
        stack.back().has_copies = true;
        break;
      }
      case TokenKind::CLOSE: {
        if (stack.empty()) {
          r.fail_index = i;
          r.reason = i == 0 ? "root must be an intent"
                            : "close bracket with nothing open";
          return r;
        }
        stack.pop_back();
        break;
      }
    }
    max_depth = std::max(max_depth, static_cast<int>(stack.size()));
  }

  if (!stack.empty()) {
    r.fail_index = seq.size();
    r.reason = std::to_string(stack.size()) + " node(s) left open";
    return r;
  }
  r.valid = true;
  r.depth = max_depth;
  return r;
}

}  // namespace detail

// Never fails: invalid sequences produce reports, not exceptions.
inline ValidityReport check_validity(const TokenSeq& seq) {
  BalanceCounter bc;
  for (const FrameToken& t : seq) bc.feed(t);

  ValidityReport rep;
  rep.open_count = bc.open_count;
  rep.close_count = bc.close_count;
  rep.prefix_legal = bc.prefix_legal;
  rep.balanced = bc.balanced();

  const detail::SchemaScan s = detail::schema_scan(seq);
  rep.schema_valid = s.valid;
  if (s.valid) rep.depth = s.depth;
  return rep;
}

// ============================================================================
// Frame trees
// ============================================================================

struct IntentNode;

struct SlotNode {
  std::string label;
  std::vector<IntentNode> children;    // nested intents, or
  std::vector<std::string> leaf_span;  // copied surface tokens; never both

  friend bool operator==(const SlotNode&, const SlotNode&) = default;
};

struct IntentNode {
  std::string label;
  std::vector<SlotNode> children;

  friend bool operator==(const IntentNode&, const IntentNode&) = default;
};

struct FrameTree {
  IntentNode root;

  friend bool operator==(const FrameTree&, const FrameTree&) = default;
};

// Stack-based tree reconstruction. Throws NotSchemaValid (with the first
// offending token index) unless the sequence passes the schema scan.
inline FrameTree parse(const TokenSeq& seq) {
  {
    const detail::SchemaScan s = detail::schema_scan(seq);
    if (!s.valid) throw NotSchemaValid(s.fail_index, s.reason);
  }

  FrameTree tree;
  std::vector<IntentNode*> intents;
  std::vector<SlotNode*> slots;
  std::vector<bool> kind_is_slot;  // mirror of the open-node stack

  for (const FrameToken& t : seq) {
    switch (t.kind) {
      case TokenKind::OPEN_INTENT:
        if (kind_is_slot.empty()) {
          tree.root.label = t.label;
          intents.push_back(&tree.root);
        } else {
          slots.back()->children.push_back(IntentNode{t.label, {}});
          intents.push_back(&slots.back()->children.back());
        }
        kind_is_slot.push_back(false);
        break;
      case TokenKind::OPEN_SLOT:
        intents.back()->children.push_back(SlotNode{t.label, {}, {}});
        slots.push_back(&intents.back()->children.back());
        kind_is_slot.push_back(true);
        break;
      case TokenKind::COPY:
        slots.back()->leaf_span.push_back(t.text);
        break;
      case TokenKind::CLOSE:
        if (kind_is_slot.back())
          slots.pop_back();
        else
          intents.pop_back();
        kind_is_slot.pop_back();
        break;
    }
  }
  return tree;
}

namespace detail {

inline void emit_tokens(const IntentNode& n, TokenSeq& out);

inline void emit_tokens(const SlotNode& s, TokenSeq& out) {
  out.push_back(FrameToken::open_slot(s.label));
  for (const IntentNode& c : s.children) emit_tokens(c, out);
  for (const std::string& w : s.leaf_span) out.push_back(FrameToken::copy(w));
  out.push_back(FrameToken::close());
}

inline void emit_tokens(const IntentNode& n, TokenSeq& out) {
  out.push_back(FrameToken::open_intent(n.label));
  for (const SlotNode& c : n.children) emit_tokens(c, out);
  out.push_back(FrameToken::close());
}

inline int depth_of(const IntentNode& n);

inline int depth_of(const SlotNode& s) {
  int best = 1;
  for (const IntentNode& c : s.children) best = std::max(best, 1 + depth_of(c));
  return best;
}

inline int depth_of(const IntentNode& n) {
  int best = 1;
  for (const SlotNode& c : n.children) best = std::max(best, 1 + depth_of(c));
  return best;
}

}  // namespace detail

// In-order token sequence of a tree; parse() of the result is the identity.
inline TokenSeq to_tokens(const FrameTree& tree) {
  TokenSeq out;
  detail::emit_tokens(tree.root, out);
  return out;
}

inline std::string serialize(const FrameTree& tree) {
  return serialize(to_tokens(tree));
}

// Maximum count of bracket nodes (intents and slots both) along any
// root-to-leaf path. Bare intent: 1. Recursive on the tree; the linear-scan
// depth in check_validity() computes the same number by a different route.
inline int depth(const FrameTree& tree) { return detail::depth_of(tree.root); }

// ============================================================================
// Exact match
// ============================================================================

// Token-for-token equality. Whitespace normalization comes for free when the
// sequences were produced by tokenize(); no credit for tree-equivalent
// reorderings or label case differences.
inline bool exact_match(const TokenSeq& pred, const TokenSeq& gold) {
  return pred == gold;
}

}  // namespace frameprobe
