#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"

using namespace smishaug;

namespace {

Message msg(const std::string& id, Label l, std::optional<Principle> p, const std::string& text) {
  Message m;
  m.id = id;
  m.label = l;
  m.principle = p;
  m.text = text;
  return m;
}

std::string golden(const std::string& name) {
  return testkit::slurp(testkit::source_dir() / "tests" / "golden" / name);
}

}  // namespace

TEST(PromptGolden, SmishingAuthority) {
  std::vector<Message> demos{
      msg("a", Label::Smishing, Principle::Authority,
          "HMRC: your tax refund of 310.44 GBP is ready. Claim at hmrc-refund.example today."),
      msg("b", Label::Smishing, Principle::Authority, "  Bank alert: a payment was blocked. Call 0800 555 0199 now. ")};
  auto b = build_prompt(Label::Smishing, Principle::Authority, demos, 10, PromptTemplateSet::defaults());
  EXPECT_EQ(b.rendered, golden("smishing_P1.txt"));
  EXPECT_EQ(b.prompt_id, make_prompt_id(b.rendered));
  ASSERT_TRUE(b.persuasion_text);
}

TEST(PromptGolden, SmishingDistraction) {
  std::vector<Message> demos{msg("a", Label::Smishing, Principle::Distraction,
                                 "You won 1000 pounds! Claim at prize-desk.example before midnight.")};
  auto b = build_prompt(Label::Smishing, Principle::Distraction, demos, 10, PromptTemplateSet::defaults());
  EXPECT_EQ(b.rendered, golden("smishing_P4.txt"));
}

TEST(PromptGolden, SpamHasNoPersuasionBlock) {
  std::vector<Message> demos{
      msg("a", Label::Spam, std::nullopt, "MegaMart: 30% off all garden furniture this weekend!"),
      msg("b", Label::Spam, std::nullopt, "Corner Bakery has free coffee with every cake until Sunday.")};
  auto b = build_prompt(Label::Spam, std::nullopt, demos, 10, PromptTemplateSet::defaults());
  EXPECT_EQ(b.rendered, golden("spam_plain.txt"));
  EXPECT_FALSE(b.persuasion_text);
  EXPECT_EQ(b.rendered.find("Persuasion principle"), std::string::npos);
}

TEST(Prompt, SectionOrderAndDefinitionForEveryPrinciple) {
  const auto& t = PromptTemplateSet::defaults();
  for (auto p : kAllPrinciples) {
    std::vector<Message> demos;
    for (int i = 0; i < 5; ++i) {
      demos.push_back(msg("d" + std::to_string(i), Label::Smishing, p, "demo text number " + std::to_string(i)));
    }
    auto b = build_prompt(Label::Smishing, p, demos, 7, t);
    const auto role = b.rendered.find(t.role_smishing);
    const auto block = b.rendered.find(std::string(principle_definition(p)));
    const auto first = b.rendered.find("Example 1: demo text number 0");
    const auto last = b.rendered.find("Example 5: demo text number 4");
    const auto out = b.rendered.find("Write 7 new messages");
    ASSERT_EQ(role, 0u);
    ASSERT_NE(block, std::string::npos) << principle_code(p);
    ASSERT_LT(role, block);
    ASSERT_LT(block, first);
    ASSERT_LT(first, last);
    ASSERT_LT(last, out);
    for (auto q : kAllPrinciples) {
      if (q != p) {
        ASSERT_EQ(b.rendered.find(std::string(principle_definition(q))), std::string::npos);
      }
    }
  }
}

TEST(Prompt, RejectsMixedDemos) {
  const auto& t = PromptTemplateSet::defaults();
  std::vector<Message> mixed{msg("a", Label::Smishing, Principle::Authority, "x"),
                             msg("b", Label::Smishing, Principle::Distraction, "y")};
  EXPECT_THROW(build_prompt(Label::Smishing, Principle::Authority, mixed, 10, t), Error);
  std::vector<Message> wrong_label{msg("a", Label::Spam, std::nullopt, "x")};
  EXPECT_THROW(build_prompt(Label::Smishing, std::nullopt, wrong_label, 10, t), Error);
  EXPECT_THROW(build_prompt(Label::Spam, std::nullopt, {}, 10, t), Error);
  EXPECT_THROW(build_prompt(Label::Ham, std::nullopt, wrong_label, 10, t), Error);
}

TEST(Prompt, DemoSamplingIsHomogeneous) {
  auto corpus = testkit::generated_corpus(400, 0);
  std::vector<Message> pool = corpus.messages;
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    auto p = kAllPrinciples[s % kPrincipleCount];
    auto d = sample_demos(pool, p, 5, rng);
    ASSERT_EQ(d.demos.size(), 5u);
    ASSERT_FALSE(d.with_replacement);
    std::set<std::string> ids;
    for (const auto& m : d.demos) {
      ASSERT_EQ(m.principle, p);
      ids.insert(m.id);
    }
    ASSERT_EQ(ids.size(), 5u);
  }
}

TEST(Prompt, SmallPoolFallsBackToReplacement) {
  std::vector<Message> pool{msg("a", Label::Smishing, Principle::SocialProof, "one"),
                            msg("b", Label::Smishing, Principle::Authority, "two")};
  Rng rng(1);
  auto d = sample_demos(pool, Principle::SocialProof, 5, rng);
  EXPECT_TRUE(d.with_replacement);
  EXPECT_EQ(d.demos.size(), 5u);
  for (const auto& m : d.demos) EXPECT_EQ(m.id, "a");
  EXPECT_THROW(sample_demos(pool, Principle::Distraction, 5, rng), Error);
}

TEST(Prompt, DemoSamplingIsRoughlyUniform) {
  std::vector<Message> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(msg("m" + std::to_string(i), Label::Spam, std::nullopt, "t"));
  std::map<std::string, int> hits;
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    Rng rng(s);
    for (const auto& m : sample_demos(pool, std::nullopt, 5, rng).demos) hits[m.id]++;
  }
  // each id lands in a draw with probability 1/2
  for (const auto& [id, n] : hits) EXPECT_NEAR(n, trials / 2, 5 * std::sqrt(trials * 0.25)) << id;
}

TEST(Templates, BundledFileMatchesDefaults) {
  auto file = PromptTemplateSet::load(testkit::source_dir() / "config" / "templates.ini");
  EXPECT_EQ(file.serialize(), PromptTemplateSet::defaults().serialize());
  EXPECT_EQ(file.hash(), PromptTemplateSet::defaults().hash());
}

TEST(Templates, RoundTripAndErrors) {
  const auto& d = PromptTemplateSet::defaults();
  auto again = PromptTemplateSet::parse(d.serialize());
  EXPECT_EQ(again.serialize(), d.serialize());
  EXPECT_THROW(PromptTemplateSet::parse("[role_smishing]\nx\n"), ConfigError);
  EXPECT_THROW(PromptTemplateSet::parse("[bogus]\nx\n"), Error);
}

TEST(ParseGeneration, NumberedListWithContinuations) {
  const std::string raw =
      "Sure, here you go:\n\n1. First message here\n2) \"Second, quoted\"\n3.\nThird starts on\nthe next line\n"
      "\n4. Fourth\n5. Fifth\n";
  auto items = parse_generation(raw, 10);
  ASSERT_EQ(items.size(), 5u);
  EXPECT_EQ(items[0], "First message here");
  EXPECT_EQ(items[1], "Second, quoted");
  EXPECT_EQ(items[2], "Third starts on the next line");
  EXPECT_EQ(parse_generation(raw, 2).size(), 2u);
}

TEST(ParseGeneration, BlockFallbackSkipsRefusals) {
  auto items = parse_generation("I'm sorry, I cannot do that.\n\nAlpha block\nstill alpha\n\nBeta block", 10);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0], "Alpha block still alpha");
  EXPECT_EQ(items[1], "Beta block");
  EXPECT_TRUE(parse_generation("I\xE2\x80\x99m just an AI, I cannot generate that.", 10).empty());
  EXPECT_TRUE(parse_generation("", 10).empty());
}
