// frame_gen.hpp - test-only helpers: random schema-valid frame generation
// and independent oracles the implementation is checked against. Nothing in
// here may call into the code paths it verifies: the balance oracle is a
// literal stack simulation, the depth oracle is a recursive descent over
// raw tokens.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "frameprobe/frame.hpp"
#include "frameprobe/rng.hpp"

namespace testkit {

using frameprobe::FrameToken;
using frameprobe::SplitMix64;
using frameprobe::TokenKind;
using frameprobe::TokenSeq;

// ============================================================================
// Random schema-valid frames
// ============================================================================

struct GenOptions {
  int max_depth = 8;            // counting both intent and slot levels
  int intent_labels = 60;
  int slot_labels = 60;
  int copy_words = 80;
  double ood_root_fraction = 0.05;  // roots drawn as UNSUPPORTED family
};

namespace detail {

inline std::string intent_label(SplitMix64& rng, const GenOptions& o) {
  return "INTENT_" + std::to_string(rng.next_below(o.intent_labels));
}

inline std::string copy_word(SplitMix64& rng, const GenOptions& o) {
  return "w" + std::to_string(rng.next_below(o.copy_words));
}

// level is the nesting level this intent occupies (root = 1).
inline void gen_intent(SplitMix64& rng, const GenOptions& o, int level,
                       bool root, TokenSeq& out) {
  std::string label;
  if (root && rng.next_unit() < o.ood_root_fraction) {
    label = rng.next_below(2) == 0 ? "UNSUPPORTED" : "UNSUPPORTED_EVENT";
  } else {
    label = intent_label(rng, o);
  }
  out.push_back(FrameToken::open_intent(label));

  if (level + 1 <= o.max_depth) {
    // Root frames lean bushier so corpora cover a spread of depths.
    const std::uint64_t max_slots = root ? 4 : 3;
    std::uint64_t n_slots = rng.next_below(max_slots + 1);
    if (root && n_slots == 0 && rng.next_unit() < 0.7) n_slots = 1;
    for (std::uint64_t s = 0; s < n_slots; ++s) {
      out.push_back(FrameToken::open_slot(
          "SLOT_" + std::to_string(rng.next_below(o.slot_labels))));
      const bool nest =
          level + 2 <= o.max_depth && rng.next_unit() < 0.35;
      if (nest) {
        const std::uint64_t kids = 1 + rng.next_below(2);
        for (std::uint64_t k = 0; k < kids; ++k)
          gen_intent(rng, o, level + 2, false, out);
      } else {
        const std::uint64_t words = rng.next_below(4);  // 0..3, empty ok
        for (std::uint64_t w = 0; w < words; ++w)
          out.push_back(FrameToken::copy(copy_word(rng, o)));
      }
      out.push_back(FrameToken::close());
    }
  }
  out.push_back(FrameToken::close());
}

}  // namespace detail

inline TokenSeq gen_frame(SplitMix64& rng, const GenOptions& opts = {}) {
  TokenSeq out;
  detail::gen_intent(rng, opts, 1, true, out);
  return out;
}

// ============================================================================
// Independent oracles
// ============================================================================

// Brute-force stack simulation: push opens, pop closes, fail on underflow;
// balanced iff the stack drains exactly.
inline bool oracle_balanced(const TokenSeq& seq) {
  std::vector<TokenKind> stack;
  for (const FrameToken& t : seq) {
    switch (t.kind) {
      case TokenKind::OPEN_INTENT:
      case TokenKind::OPEN_SLOT:
        stack.push_back(t.kind);
        break;
      case TokenKind::CLOSE:
        if (stack.empty()) return false;
        stack.pop_back();
        break;
      case TokenKind::COPY:
        break;
    }
  }
  return stack.empty();
}

namespace detail {

// Recursive max-nesting: node depth = 1 + deepest child. `pos` sits on an
// open token on entry and lands one past the matching close on exit.
// Returns -1 on malformed structure (never expected for schema-valid input).
inline int node_depth(const TokenSeq& seq, std::size_t& pos) {
  if (pos >= seq.size() || !seq[pos].is_open()) return -1;
  ++pos;
  int deepest_child = 0;
  while (pos < seq.size() && seq[pos].kind != TokenKind::CLOSE) {
    if (seq[pos].is_open()) {
      const int child = node_depth(seq, pos);
      if (child < 0) return -1;
      deepest_child = std::max(deepest_child, child);
    } else {
      ++pos;  // copy token, contributes no nesting
    }
  }
  if (pos >= seq.size()) return -1;
  ++pos;  // consume close
  return 1 + deepest_child;
}

}  // namespace detail

inline int oracle_depth(const TokenSeq& seq) {
  std::size_t pos = 0;
  const int d = detail::node_depth(seq, pos);
  return pos == seq.size() ? d : -1;
}

// Token-level Levenshtein distance (insert/delete/substitute, unit costs).
inline int token_edit_distance(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace testkit
