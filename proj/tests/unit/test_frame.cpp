// Tokenizer, validity, tree parsing, depth, and exact match.

#include <catch2/catch.hpp>

#include "frameprobe/frame.hpp"
#include "support/frame_gen.hpp"

using namespace frameprobe;

TEST_CASE("tokenize lexes the four token kinds") {
  const TokenSeq seq = tokenize("[IN:GET_EVENT [SL:DATE tonight ] ]");
  REQUIRE(seq.size() == 5);
  CHECK(seq[0] == FrameToken::open_intent("GET_EVENT"));
  CHECK(seq[1] == FrameToken::open_slot("DATE"));
  CHECK(seq[2] == FrameToken::copy("tonight"));
  CHECK(seq[3] == FrameToken::close());
  CHECK(seq[4] == FrameToken::close());
}

TEST_CASE("tokenize handles a lone close bracket") {
  const TokenSeq seq = tokenize("]");
  REQUIRE(seq.size() == 1);
  CHECK(seq[0].kind == TokenKind::CLOSE);
}

TEST_CASE("tokenize rejects open brackets with empty labels") {
  CHECK_THROWS_AS(tokenize("[IN:"), MalformedBracketToken);
  CHECK_THROWS_AS(tokenize("[SL:"), MalformedBracketToken);
  CHECK_THROWS_AS(tokenize("[IN:GET [SL:"), MalformedBracketToken);
}

TEST_CASE("tokenize rejects bracket characters inside labels") {
  CHECK_THROWS_AS(tokenize("[IN:A]B"), MalformedBracketToken);
  CHECK_THROWS_AS(tokenize("[SL:A[B"), MalformedBracketToken);
}

TEST_CASE("tokenize rejects blank input") {
  CHECK_THROWS_AS(tokenize(""), EmptyInput);
  CHECK_THROWS_AS(tokenize("  \t \n"), EmptyInput);
}

TEST_CASE("tokenize treats non-bracket units as opaque copy tokens") {
  const TokenSeq seq = tokenize("[] ]x [span1] héllo");
  REQUIRE(seq.size() == 4);
  for (const FrameToken& t : seq) CHECK(t.kind == TokenKind::COPY);
  CHECK(seq[3].text == "héllo");
}

TEST_CASE("tokenize case folding is opt-in and label-only") {
  CHECK(tokenize("[in:x")[0].kind == TokenKind::COPY);

  TokenizeOptions fold;
  fold.fold_case = true;
  const TokenSeq seq = tokenize("[in:x [sl:date Tonight ] ]", fold);
  CHECK(seq[0] == FrameToken::open_intent("X"));
  CHECK(seq[1] == FrameToken::open_slot("DATE"));
  CHECK(seq[2] == FrameToken::copy("Tonight"));  // copies keep their case
}

TEST_CASE("whitespace runs and kinds of whitespace do not matter") {
  CHECK(tokenize(" [IN:X \t  ] \r\n") == tokenize("[IN:X ]"));
}

TEST_CASE("check_validity on a minimal frame") {
  const ValidityReport v = check_validity(tokenize("[IN:X ]"));
  CHECK(v.open_count == 1);
  CHECK(v.close_count == 1);
  CHECK(v.balanced);
  CHECK(v.prefix_legal);
  CHECK(v.schema_valid);
  REQUIRE(v.depth.has_value());
  CHECK(*v.depth == 1);
}

TEST_CASE("check_validity flags a missing close") {
  const ValidityReport v = check_validity(tokenize("[IN:X [SL:A a ]"));
  CHECK(v.open_count == 2);
  CHECK(v.close_count == 1);
  CHECK_FALSE(v.balanced);
  CHECK(v.prefix_legal);
  CHECK_FALSE(v.schema_valid);
  CHECK_FALSE(v.depth.has_value());
}

TEST_CASE("check_validity reports depth for nested frames") {
  const ValidityReport v = check_validity(tokenize("[IN:X [SL:A [IN:Y ] ] ]"));
  CHECK(v.schema_valid);
  REQUIRE(v.depth.has_value());
  CHECK(*v.depth == 3);
}

TEST_CASE("balance and schema validity are distinct tiers") {
  // Two roots balance but do not make one tree.
  const ValidityReport two_roots = check_validity(tokenize("[IN:X ] [IN:Y ]"));
  CHECK(two_roots.balanced);
  CHECK_FALSE(two_roots.schema_valid);

  // A copy token directly under an intent balances but violates the schema.
  const ValidityReport copy_in_intent = check_validity(tokenize("[IN:X a ]"));
  CHECK(copy_in_intent.balanced);
  CHECK_FALSE(copy_in_intent.schema_valid);

  const ValidityReport nested_intent =
      check_validity(tokenize("[IN:X [IN:Y ] ]"));
  CHECK(nested_intent.balanced);
  CHECK_FALSE(nested_intent.schema_valid);

  const ValidityReport nested_slot =
      check_validity(tokenize("[IN:X [SL:A [SL:B ] ] ]"));
  CHECK(nested_slot.balanced);
  CHECK_FALSE(nested_slot.schema_valid);
}

TEST_CASE("slots cannot mix copy tokens and child intents") {
  CHECK_FALSE(
      check_validity(tokenize("[IN:X [SL:A a [IN:Y ] ] ]")).schema_valid);
  CHECK_FALSE(
      check_validity(tokenize("[IN:X [SL:A [IN:Y ] a ] ]")).schema_valid);
}

TEST_CASE("empty leaf spans are schema-valid") {
  const ValidityReport v = check_validity(tokenize("[IN:X [SL:A ] ]"));
  CHECK(v.schema_valid);
  CHECK(*v.depth == 2);
}

TEST_CASE("empty sequences balance vacuously but have no schema") {
  const ValidityReport v = check_validity(TokenSeq{});
  CHECK(v.balanced);
  CHECK_FALSE(v.schema_valid);
}

TEST_CASE("parse recovers the tree") {
  const FrameTree tree = parse(tokenize("[IN:GET_EVENT [SL:DATE tonight ] ]"));
  CHECK(tree.root.label == "GET_EVENT");
  REQUIRE(tree.root.children.size() == 1);
  const SlotNode& slot = tree.root.children[0];
  CHECK(slot.label == "DATE");
  CHECK(slot.children.empty());
  CHECK(slot.leaf_span == std::vector<std::string>{"tonight"});
}

TEST_CASE("parse handles a leaf-only root") {
  const FrameTree tree = parse(tokenize("[IN:UNSUPPORTED ]"));
  CHECK(tree.root.label == "UNSUPPORTED");
  CHECK(tree.root.children.empty());
}

TEST_CASE("parse reports the first offending token index") {
  try {
    parse(tokenize("[SL:DATE ]"));
    FAIL("expected NotSchemaValid");
  } catch (const NotSchemaValid& e) {
    CHECK(e.index == 0);
  }

  try {
    parse(tokenize("[IN:X a ]"));
    FAIL("expected NotSchemaValid");
  } catch (const NotSchemaValid& e) {
    CHECK(e.index == 1);
  }

  try {
    parse(tokenize("[IN:X [SL:A a ]"));  // unclosed root
    FAIL("expected NotSchemaValid");
  } catch (const NotSchemaValid& e) {
    CHECK(e.index == 4);
  }
}

TEST_CASE("depth counts intent and slot levels") {
  CHECK(depth(parse(tokenize("[IN:X ]"))) == 1);
  CHECK(depth(parse(tokenize("[IN:X [SL:A a ] ]"))) == 2);
  CHECK(depth(parse(tokenize("[IN:X [SL:A [IN:Y [SL:B b ] ] ] ]"))) == 4);
}

TEST_CASE("exact_match is plain token equality") {
  const TokenSeq g = tokenize("[IN:X [SL:A a ] ]");
  CHECK(exact_match(g, g));
  CHECK_FALSE(exact_match(tokenize("[IN:X ]"), tokenize("[IN:Y ]")));
  CHECK_FALSE(
      exact_match(tokenize("[IN:X [SL:A a ]"), tokenize("[IN:X [SL:A a ] ]")));
}

TEST_CASE("serialize round trips through tokenize and parse") {
  for (const char* text :
       {"[IN:GET_EVENT [SL:DATE tonight ] ]", "[IN:UNSUPPORTED ]",
        "[IN:X [SL:A [IN:Y [SL:B b ] ] ] ]", "[IN:X [SL:A ] ]"}) {
    const TokenSeq seq = tokenize(text);
    const FrameTree tree = parse(seq);
    CHECK(serialize(tree) == text);
    CHECK(parse(tokenize(serialize(tree))) == tree);
  }
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

TEST_CASE("property: serialize(parse(s)) is the identity on random frames") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const TokenSeq seq = testkit::gen_frame(rng);
    REQUIRE(check_validity(seq).schema_valid);
    CHECK(to_tokens(parse(seq)) == seq);
    CHECK(tokenize(serialize(seq)) == seq);
  }
}

TEST_CASE("property: balanced agrees with a stack simulator, exhaustively") {
  // Every token sequence of length <= 7 over a 7-symbol alphabet (the
  // acceptance suite pushes the same check to length 12).
  const std::vector<FrameToken> alphabet = {
      FrameToken::open_intent("A"), FrameToken::open_intent("B"),
      FrameToken::open_slot("C"),   FrameToken::open_slot("D"),
      FrameToken::close(),          FrameToken::copy("w1"),
      FrameToken::copy("w2")};
  TokenSeq seq;
  long checked = 0;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (!seq.empty()) {
      ++checked;
      REQUIRE(check_validity(seq).balanced == testkit::oracle_balanced(seq));
    }
    if (remaining == 0) return;
    for (const FrameToken& s : alphabet) {
      seq.push_back(s);
      self(self, remaining - 1);
      seq.pop_back();
    }
  };
  rec(rec, 7);
  CHECK(checked == 7 + 49 + 343 + 2401 + 16807 + 117649 + 823543);
}

TEST_CASE("property: depth agrees with the recursive nesting oracle") {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const TokenSeq seq = testkit::gen_frame(rng);
    const int expected = testkit::oracle_depth(seq);
    REQUIRE(expected >= 1);
    CHECK(depth(parse(seq)) == expected);
    CHECK(*check_validity(seq).depth == expected);
  }
}

TEST_CASE("property: exact_match is reflexive and symmetric") {
  SplitMix64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const TokenSeq a = testkit::gen_frame(rng);
    const TokenSeq b = testkit::gen_frame(rng);
    CHECK(exact_match(a, a));
    CHECK(exact_match(a, b) == exact_match(b, a));
  }
}

TEST_CASE("property: schema validity implies balance on arbitrary soup") {
  SplitMix64 rng(2718);
  for (int i = 0; i < 2000; ++i) {
    TokenSeq seq;
    const std::uint64_t len = 1 + rng.next_below(10);
    for (std::uint64_t j = 0; j < len; ++j) {
      switch (rng.next_below(4)) {
        case 0: seq.push_back(FrameToken::open_intent("I")); break;
        case 1: seq.push_back(FrameToken::open_slot("S")); break;
        case 2: seq.push_back(FrameToken::close()); break;
        default: seq.push_back(FrameToken::copy("w")); break;
      }
    }
    const ValidityReport v = check_validity(seq);
    CHECK(v.balanced == (v.prefix_legal && v.open_count == v.close_count));
    if (v.schema_valid) {
      CHECK(v.balanced);
      CHECK(v.depth.has_value());
    } else {
      CHECK_FALSE(v.depth.has_value());
    }
  }
}

TEST_CASE("property: deleting any close from a balanced sequence breaks it") {
  SplitMix64 rng(31337);
  for (int i = 0; i < 100; ++i) {
    const TokenSeq seq = testkit::gen_frame(rng);
    REQUIRE(check_validity(seq).balanced);
    for (std::size_t j = 0; j < seq.size(); ++j) {
      if (seq[j].kind != TokenKind::CLOSE) continue;
      TokenSeq cut = seq;
      cut.erase(cut.begin() + static_cast<std::ptrdiff_t>(j));
      CHECK_FALSE(check_validity(cut).balanced);
    }
  }
}
