// Ontology scanning, single-error injection, synthetic probabilities.

#include <catch2/catch.hpp>

#include <cmath>

#include "frameprobe/perturb.hpp"
#include "support/frame_gen.hpp"

using namespace frameprobe;

namespace {

Ontology two_by_two() {
  Ontology onto;
  onto.intent_labels = {"X", "Y"};
  onto.slot_labels = {"A", "B"};
  return onto;
}

}  // namespace

TEST_CASE("the generator matches the published splitmix64 vectors") {
  // Reference outputs for seed 0; any drift here would silently break
  // seeded reproducibility across releases.
  SplitMix64 rng(0);
  const std::uint64_t first = rng.next();
  const std::uint64_t second = rng.next();
  const std::uint64_t third = rng.next();
  CHECK(first == 0xE220A8397B1DCDAFULL);
  CHECK(second == 0x6E789E6AA1B965F4ULL);
  CHECK(third == 0x06C45D188009454FULL);

  SplitMix64 unit(0);
  const double u = unit.next_unit();
  CHECK(u > 0.0);
  CHECK(u < 1.0);
  CHECK(u == (static_cast<double>(0xE220A8397B1DCDAFULL >> 11) + 0.5) *
                 0x1.0p-53);
}

TEST_CASE("scan_ontology unions labels") {
  const Ontology onto = scan_ontology({tokenize("[IN:X [SL:A a ] ]")});
  CHECK(onto.intent_labels == std::set<std::string>{"X"});
  CHECK(onto.slot_labels == std::set<std::string>{"A"});
  CHECK(onto.ood_labels.empty());
}

TEST_CASE("scan_ontology spots the UNSUPPORTED family") {
  const Ontology onto = scan_ontology(
      {tokenize("[IN:UNSUPPORTED ]"), tokenize("[IN:UNSUPPORTED_EVENT ]"),
       tokenize("[IN:GET_EVENT ]")});
  CHECK(onto.ood_labels ==
        std::set<std::string>{"UNSUPPORTED", "UNSUPPORTED_EVENT"});
  CHECK(onto.intent_labels.size() == 3);
}

TEST_CASE("scan_ontology rejects an empty corpus") {
  CHECK_THROWS_AS(scan_ontology({}), EmptyCorpus);
}

TEST_CASE("slot injection swaps the only slot to the smallest alternative") {
  PerturbationSpec spec;
  spec.error_type = ErrorType::SLOT;
  spec.seed = 17;
  const Perturbed p =
      perturb(tokenize("[IN:X [SL:A a ] ]"), spec, two_by_two());
  CHECK(serialize(p.tokens) == "[IN:X [SL:B a ] ]");
  CHECK(p.position == 1);
  CHECK(p.detail == EditDetail::SLOT_SWAP);
}

TEST_CASE("leaf injection drops the preposition from a two-word span") {
  PerturbationSpec spec;
  spec.error_type = ErrorType::LEAF;
  const Perturbed p =
      perturb(tokenize("[IN:X [SL:A on Monday ] ]"), spec, two_by_two());
  CHECK(serialize(p.tokens) == "[IN:X [SL:A Monday ] ]");
  CHECK(p.position == 2);
  CHECK(p.detail == EditDetail::LEAF_DROP_FIRST);
}

TEST_CASE("leaf injection doubles a single-word span") {
  PerturbationSpec spec;
  spec.error_type = ErrorType::LEAF;
  const Perturbed p =
      perturb(tokenize("[IN:X [SL:A tonight ] ]"), spec, two_by_two());
  CHECK(serialize(p.tokens) == "[IN:X [SL:A tonighttonight ] ]");
  CHECK(p.detail == EditDetail::LEAF_SUBSTITUTE);
}

TEST_CASE("mode injection on a bare frame deletes or replaces a close") {
  PerturbationSpec spec;
  spec.error_type = ErrorType::MODE;
  bool saw_delete = false, saw_replace = false;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    spec.seed = seed;
    const Perturbed p = perturb(tokenize("[IN:X ]"), spec, two_by_two());
    if (p.detail == EditDetail::MODE_DELETE_CLOSE) {
      saw_delete = true;
      CHECK(serialize(p.tokens) == "[IN:X");
      CHECK_FALSE(check_validity(p.tokens).balanced);
    } else {
      REQUIRE(p.detail == EditDetail::MODE_CLOSE_TO_COPY);
      saw_replace = true;
      CHECK(p.tokens.back().kind == TokenKind::COPY);
    }
    CHECK(p.position == 1);
  }
  CHECK(saw_delete);
  CHECK(saw_replace);
}

TEST_CASE("ood injection swaps the root in both directions") {
  Ontology onto = two_by_two();
  onto.intent_labels.insert("UNSUPPORTED");
  onto.ood_labels.insert("UNSUPPORTED");

  PerturbationSpec spec;
  spec.error_type = ErrorType::OOD;

  const Perturbed to_ood =
      perturb(tokenize("[IN:X [SL:A a ] ]"), spec, onto);
  CHECK(to_ood.tokens[0] == FrameToken::open_intent("UNSUPPORTED"));
  CHECK(to_ood.position == 0);

  const Perturbed from_ood = perturb(tokenize("[IN:UNSUPPORTED ]"), spec, onto);
  CHECK(from_ood.tokens[0] == FrameToken::open_intent("X"));  // smallest
  CHECK(from_ood.detail == EditDetail::OOD_ROOT_SWAP);
}

TEST_CASE("inapplicable injections are reported, not faked") {
  PerturbationSpec spec;
  const Ontology onto = two_by_two();

  spec.error_type = ErrorType::SLOT;
  CHECK_THROWS_AS(perturb(tokenize("[IN:X ]"), spec, onto),
                  TypeNotApplicable);

  spec.error_type = ErrorType::LEAF;
  CHECK_THROWS_AS(perturb(tokenize("[IN:X [SL:A ] ]"), spec, onto),
                  TypeNotApplicable);

  spec.error_type = ErrorType::OOD;  // ontology has no ood labels
  CHECK_THROWS_AS(perturb(tokenize("[IN:X ]"), spec, onto),
                  TypeNotApplicable);

  spec.error_type = ErrorType::INTENT;  // no alternative intent label
  Ontology lone;
  lone.intent_labels = {"X"};
  lone.slot_labels = {"A"};
  CHECK_THROWS_AS(perturb(tokenize("[IN:X ]"), spec, lone),
                  TypeNotApplicable);
}

TEST_CASE("intent injection at the root preserves ood status") {
  Ontology onto;
  onto.intent_labels = {"UNSUPPORTED", "UNSUPPORTED_EVENT", "X"};
  onto.ood_labels = {"UNSUPPORTED", "UNSUPPORTED_EVENT"};
  PerturbationSpec spec;
  spec.error_type = ErrorType::INTENT;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    spec.seed = seed;
    const Perturbed p = perturb(tokenize("[IN:UNSUPPORTED ]"), spec, onto);
    CHECK(p.tokens[0] == FrameToken::open_intent("UNSUPPORTED_EVENT"));
  }
}

TEST_CASE("perturb is deterministic in (frame, spec, ontology)") {
  SplitMix64 rng(2);
  const Ontology onto = [&] {
    std::vector<TokenSeq> frames;
    for (int i = 0; i < 50; ++i) frames.push_back(testkit::gen_frame(rng));
    frames.push_back(tokenize("[IN:UNSUPPORTED ]"));
    return scan_ontology(frames);
  }();
  for (int i = 0; i < 50; ++i) {
    const TokenSeq frame = testkit::gen_frame(rng);
    for (ErrorType type : kAllErrorTypes) {
      PerturbationSpec spec;
      spec.error_type = type;
      spec.seed = 77 + static_cast<std::uint64_t>(i);
      try {
        const Perturbed a = perturb(frame, spec, onto);
        const Perturbed b = perturb(frame, spec, onto);
        CHECK(a.tokens == b.tokens);
        CHECK(a.position == b.position);
        CHECK(a.detail == b.detail);
      } catch (const TypeNotApplicable&) {
      }
    }
  }
}

TEST_CASE("synth_probs with zero jitter is the exact mean") {
  PerturbationSpec spec;
  spec.prob_profile = {0.9, 0.6, 0.0};
  const TokenSeq frame = tokenize("[IN:X [SL:A a ] ]");
  for (double p : synth_probs(frame, true, spec)) CHECK(p == 0.9);
  for (double p : synth_probs(frame, false, spec)) CHECK(p == 0.6);
}

TEST_CASE("synth_probs is deterministic and in range") {
  PerturbationSpec spec;
  spec.seed = 99;
  spec.prob_profile = {0.9, 0.6, 0.05};
  const TokenSeq frame = tokenize("[IN:X [SL:A a b c d ] ]");
  const auto a = synth_probs(frame, true, spec);
  const auto b = synth_probs(frame, true, spec);
  CHECK(a == b);
  for (double p : a) {
    CHECK(p > 0.85);
    CHECK(p < 0.95);
  }
}

TEST_CASE("synth_probs sample means land near the target") {
  PerturbationSpec spec;
  spec.seed = 5;
  spec.prob_profile = {0.9, 0.6, 0.05};
  TokenSeq frame;
  frame.push_back(FrameToken::open_intent("X"));
  frame.push_back(FrameToken::open_slot("A"));
  for (int i = 0; i < 46; ++i) frame.push_back(FrameToken::copy("w"));
  frame.push_back(FrameToken::close());
  frame.push_back(FrameToken::close());
  REQUIRE(frame.size() == 50);

  for (bool correct : {true, false}) {
    const auto probs = synth_probs(frame, correct, spec);
    double mean = 0.0;
    for (double p : probs) mean += p;
    mean /= static_cast<double>(probs.size());
    CHECK(std::abs(mean - (correct ? 0.9 : 0.6)) < 0.05);
  }
}

TEST_CASE("prob profiles are validated") {
  PerturbationSpec spec;
  spec.prob_profile = {0.6, 0.9, 0.0};  // reversed means
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.prob_profile = {0.9, 0.6, 0.5};  // jitter escapes (0,1)
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.prob_profile = {0.9, 0.6, 0.05};
  CHECK_NOTHROW(spec.validate());
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

TEST_CASE("property: every injection is exactly one edit") {
  SplitMix64 rng(13);
  const Ontology onto = [&] {
    std::vector<TokenSeq> frames;
    for (int i = 0; i < 80; ++i) frames.push_back(testkit::gen_frame(rng));
    frames.push_back(tokenize("[IN:UNSUPPORTED ]"));
    return scan_ontology(frames);
  }();

  int applied = 0;
  for (int i = 0; i < 120; ++i) {
    const TokenSeq frame = testkit::gen_frame(rng);
    for (ErrorType type : kAllErrorTypes) {
      PerturbationSpec spec;
      spec.error_type = type;
      spec.seed = static_cast<std::uint64_t>(i);
      try {
        const Perturbed p = perturb(frame, spec, onto);
        CHECK(testkit::token_edit_distance(frame, p.tokens) == 1);
        CHECK_FALSE(exact_match(p.tokens, frame));
        ++applied;
      } catch (const TypeNotApplicable&) {
      }
    }
  }
  CHECK(applied > 300);
}

TEST_CASE("property: classification recovers the injected type") {
  SplitMix64 rng(21);
  const Ontology onto = [&] {
    std::vector<TokenSeq> frames;
    for (int i = 0; i < 80; ++i) frames.push_back(testkit::gen_frame(rng));
    frames.push_back(tokenize("[IN:UNSUPPORTED ]"));
    return scan_ontology(frames);
  }();

  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const TokenSeq frame = testkit::gen_frame(rng);
    for (ErrorType type : kAllErrorTypes) {
      PerturbationSpec spec;
      spec.error_type = type;
      spec.seed = 9000 + static_cast<std::uint64_t>(i);
      Perturbed p;
      try {
        p = perturb(frame, spec, onto);
      } catch (const TypeNotApplicable&) {
        continue;
      }
      const auto div = first_divergence(p.tokens, frame);
      REQUIRE(div.has_value());
      CHECK(div->position == p.position);
      const ErrorType got = classify_error(
          *div, frame.front().label, root_intent_label(p.tokens), onto.ood());
      CHECK(got == type);
      if (p.detail == EditDetail::MODE_DELETE_CLOSE)
        CHECK_FALSE(check_validity(p.tokens).balanced);
      ++checked;
    }
  }
  CHECK(checked > 600);
}
