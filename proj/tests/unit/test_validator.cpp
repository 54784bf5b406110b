#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "mock_llm.hpp"

using namespace smishaug;

TEST(Validator, RejectsPlaceholders) {
  Validator v;
  auto r = v.validate("Your account is locked. Visit [Fake URL] to restore access for [Recipients].",
                      Label::Smishing);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.reason, RejectReason::Placeholder);
  EXPECT_EQ(v.validate("Hi {name}, call 0800 555 1234 now please", Label::Smishing).reason,
            RejectReason::Placeholder);
  EXPECT_EQ(v.validate("Hi <Recipient Name>, see bank-help.com today", Label::Smishing).reason,
            RejectReason::Placeholder);
}

TEST(Validator, ArtifactRuleForSmishingOnly) {
  Validator v;
  const std::string bare = "Your account needs attention. Please act quickly to keep it open.";
  EXPECT_EQ(v.validate(bare, Label::Smishing).reason, RejectReason::NoActionableArtifact);
  EXPECT_TRUE(v.validate(bare, Label::Spam).accepted);
  EXPECT_TRUE(v.validate("Verify now at https://secure.bank-check.example/login", Label::Smishing).accepted);
  EXPECT_TRUE(v.validate("Verify at www.bank-check.info please", Label::Smishing).accepted);
  EXPECT_TRUE(v.validate("Verify at bank-check.xyz please", Label::Smishing).accepted);
  EXPECT_TRUE(v.validate("Call 0800-555-1234 about your refund", Label::Smishing).accepted);
  EXPECT_TRUE(v.validate("Call +44 7700 900123 about your refund", Label::Smishing).accepted);
  EXPECT_FALSE(v.validate("Pay 25 pounds by 12 May or else, friend", Label::Smishing).accepted);

  ValidationRules off;
  off.smishing_requires_artifact = false;
  EXPECT_TRUE(Validator(off).validate(bare, Label::Smishing).accepted);
}

TEST(Validator, LengthBoundsCountCodePoints) {
  ValidationRules r;
  r.min_chars = 5;
  r.max_chars = 12;
  Validator v(r);
  EXPECT_EQ(v.validate("   ", Label::Spam).reason, RejectReason::Empty);
  EXPECT_EQ(v.validate("abcd", Label::Spam).reason, RejectReason::TooShort);
  EXPECT_TRUE(v.validate("\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9", Label::Spam).accepted);  // 5 code points
  EXPECT_EQ(v.validate("abcdefghijklm", Label::Spam).reason, RejectReason::TooLong);
}

TEST(Validator, BadRulesReportEveryProblem) {
  ValidationRules r;
  r.min_chars = 50;
  r.max_chars = 10;
  r.url_pattern = "(unclosed";
  try {
    Validator v(r);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
}

TEST(Validator, RulesJsonRoundTrip) {
  ValidationRules r;
  r.min_chars = 7;
  r.placeholder_patterns = {"XX"};
  auto back = ValidationRules::from_json(nlohmann::json::parse(r.to_json().dump()));
  EXPECT_EQ(back.to_json(), r.to_json());
  EXPECT_EQ(back.hash(), r.hash());
}

TEST(Dedup, NormalizationCollapsesCaseAndSpace) {
  EXPECT_EQ(text::normalize("  Win A   PRIZE\tnow "), text::normalize("win a prize now"));
  auto out = dedup({"Win a prize now", "win  a PRIZE now", "Other text", "Old one"}, {"old ONE"});
  EXPECT_EQ(out, (std::vector<std::string>{"Win a prize now", "Other text"}));
}

TEST(Dedup, MatchesBruteForceOracle) {
  const std::vector<std::string> atoms{"a", "A", "b", " a", "c  d", "C d", "e"};
  Rng rng(5);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::string> cand, existing;
    for (std::uint64_t i = 0, n = rng.below(8); i < n; ++i) cand.push_back(atoms[rng.below(atoms.size())]);
    for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) existing.push_back(atoms[rng.below(atoms.size())]);
    // quadratic reference: keep c when no earlier kept item or existing item normalizes equal
    std::vector<std::string> expect;
    for (const auto& c : cand) {
      bool dup = false;
      for (const auto& e : existing) dup = dup || text::normalize(e) == text::normalize(c);
      for (const auto& k : expect) dup = dup || text::normalize(k) == text::normalize(c);
      if (!dup) expect.push_back(c);
    }
    ASSERT_EQ(dedup(cand, existing), expect);
  }
}

TEST(Validator, MockOutputPassRateIsPlausible) {
  testkit::MockLlm mock(3);
  Validator v;
  std::size_t ok = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    auto items = parse_generation(mock.respond("You are a smishing message generator. Write 10 new messages"), 10);
    for (const auto& s : items) {
      ++total;
      ok += v.validate(s, Label::Smishing).accepted;
    }
  }
  EXPECT_EQ(total, 200u);
  EXPECT_GT(ok, 160u);
}
