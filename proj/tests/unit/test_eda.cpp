#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fixtures.hpp"

using namespace smishaug;
using namespace smishaug::eda;

namespace {

const std::string kKyc =
    "Dear (paytm)customer your paytm KYC has been suspended PAY-TM office PH 7679046492 Your Paytm A/C will "
    "block within 24hr Thank you.";

SynonymLexicon lex_from(const std::string& body) {
  std::istringstream in(body);
  return SynonymLexicon::parse(in);
}

EdaParams seeded(std::uint64_t seed, double alpha = 0.1) {
  EdaParams p;
  p.seed = seed;
  p.alpha = alpha;
  return p;
}

std::vector<std::string> sorted_tokens(const std::string& s) {
  auto t = text::tokenize(s);
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

TEST(EdaCount, RoundHalfUpWithFloorOne) {
  EXPECT_EQ(change_count(0.1, 21), 2u);
  EXPECT_EQ(change_count(0.1, 25), 3u);  // 2.5 rounds up
  EXPECT_EQ(change_count(0.1, 24), 2u);
  EXPECT_EQ(change_count(0.1, 3), 1u);
  EXPECT_EQ(change_count(0.1, 1), 1u);
}

TEST(Lexicon, ParseLookupAndValidation) {
  auto lex = lex_from("# comment\nOffice\tplace, billet\nwithin\tinside\n");
  ASSERT_NE(lex.lookup("OFFICE,"), nullptr);
  EXPECT_EQ(*lex.lookup("office"), (std::vector<std::string>{"place", "billet"}));
  EXPECT_EQ(lex.lookup("nothing"), nullptr);
  EXPECT_THROW(lex_from("word\tword\n"), Error);          // only itself
  EXPECT_THROW(lex_from("word\ttwo words\n"), Error);     // multi-token synonym
  EXPECT_THROW(lex_from("no tab here\n"), Error);
  auto self = lex_from("call\tcall,phone\n");
  EXPECT_EQ(*self.lookup("call"), (std::vector<std::string>{"phone"}));
  EXPECT_FALSE(SynonymLexicon::builtin().empty());
}

TEST(Lexicon, BundledFileMatchesBuiltin) {
  auto file = SynonymLexicon::load(testkit::data_path("lexicon.tsv"));
  EXPECT_EQ(file.entries(), SynonymLexicon::builtin().entries());
  auto words = load_stopwords(testkit::data_path("stopwords.txt"));
  EXPECT_EQ(*words, *default_stopwords());
}

TEST(Stopwords, TableWordsAreNotStopwords) {
  EdaParams p;
  EXPECT_FALSE(p.is_stopword("within"));
  EXPECT_FALSE(p.is_stopword("office"));
  EXPECT_TRUE(p.is_stopword("Your"));
  EXPECT_TRUE(p.is_stopword("the,"));
}

TEST(SynonymReplacement, KycGolden) {
  auto lex = lex_from("office\tplace\nwithin\tinside\n");
  for (std::uint64_t seed : {0ULL, 1ULL, 77ULL}) {
    auto r = synonym_replacement(kKyc, lex, seeded(seed));
    EXPECT_EQ(r.text,
              "Dear (paytm)customer your paytm KYC has been suspended PAY-TM place PH 7679046492 Your Paytm A/C "
              "will block inside 24hr Thank you.");
    EXPECT_EQ(r.edits, 2u);
  }
}

TEST(SynonymReplacement, AllStopwordsUnchanged) {
  auto r = synonym_replacement("you and i are the ones", SynonymLexicon::builtin(), seeded(3));
  EXPECT_TRUE(r.unchanged());
  EXPECT_EQ(r.text, "you and i are the ones");
}

TEST(SynonymReplacement, KeepsAffixes) {
  auto lex = lex_from("office\tbureau\n");
  auto r = synonym_replacement("(office), now", lex, seeded(1));
  EXPECT_EQ(r.text, "(bureau), now");
}

TEST(RandomInsertion, KycGolden) {
  auto lex = lex_from("office\tplace,billet\n");
  auto r = random_insertion(kKyc, lex, seeded(922));
  EXPECT_EQ(r.text,
            "Dear (paytm)customer your paytm KYC place has been billet suspended PAY-TM office PH 7679046492 Your "
            "Paytm A/C will block within 24hr Thank you.");
  EXPECT_EQ(r.edits, 2u);
}

TEST(RandomInsertion, EmptyLexiconUnchanged) {
  auto r = random_insertion(kKyc, SynonymLexicon{}, seeded(5));
  EXPECT_EQ(r.text, kKyc);
  EXPECT_TRUE(r.unchanged());
}

TEST(RandomInsertion, GrowsByExactlyNWithFullCoverage) {
  auto lex = lex_from("alpha\ta1,a2\nbeta\tb1\ngamma\tg1,g2,g3\n");
  std::set<std::string> syns{"a1", "a2", "b1", "g1", "g2", "g3"};
  const std::string in = "alpha beta the gamma alpha of beta gamma alpha beta gamma alpha";
  const auto l = text::tokenize(in).size();
  for (std::uint64_t s = 0; s < 500; ++s) {
    auto r = random_insertion(in, lex, seeded(s, 0.3));
    auto out = text::tokenize(r.text);
    ASSERT_EQ(out.size(), l + change_count(0.3, l));
    // every new token is a synonym of a non-stopword source
    auto orig = text::tokenize(in);
    std::multiset<std::string> extra(out.begin(), out.end());
    for (const auto& t : orig) extra.erase(extra.find(t));
    for (const auto& t : extra) ASSERT_TRUE(syns.count(t)) << t;
  }
}

TEST(RandomSwap, KycGolden) {
  auto r = random_swap(kKyc, seeded(86135));
  EXPECT_EQ(r.text,
            "Dear (paytm)customer your paytm KYC has been Your PAY-TM office PH 7679046492 suspended will A/C Paytm "
            "block within 24hr Thank you.");
}

TEST(RandomSwap, SingleTokenUnchanged) {
  EXPECT_EQ(random_swap("hello", seeded(1)).text, "hello");
}

TEST(RandomDeletion, ZeroAndOneProbability) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_EQ(random_deletion_with_probability(kKyc, 0.0, s).text, kKyc);
    auto one = random_deletion_with_probability(kKyc, 1.0, s);
    ASSERT_EQ(text::tokenize(one.text).size(), 1u);
    auto orig = text::tokenize(kKyc);
    EXPECT_NE(std::find(orig.begin(), orig.end(), one.text), orig.end());
  }
  EXPECT_THROW(random_deletion_with_probability(kKyc, 1.5, 1), Error);
}

TEST(RandomDeletion, MeanSurvivorsNearBinomial) {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "w" + std::to_string(i) + " ";
  const int trials = 2000;
  double sum = 0;
  for (int t = 0; t < trials; ++t) {
    sum += static_cast<double>(text::tokenize(random_deletion_with_probability(text, 0.1, 1000 + t).text).size());
  }
  const double sigma_mean = std::sqrt(100 * 0.1 * 0.9 / trials);
  EXPECT_NEAR(sum / trials, 90.0, 3 * sigma_mean);
}

TEST(Eda, DeterministicAndNeverEmpty) {
  const auto& lex = SynonymLexicon::builtin();
  auto corpus = testkit::annotated_synthetic_corpus();
  for (const auto& m : corpus.messages) {
    for (auto t : {Technique::SR, Technique::RI, Technique::RS, Technique::RD}) {
      auto p = seeded(variant_seed(1, m.id, t, 1));
      auto a = apply(t, m.text, lex, p);
      auto b = apply(t, m.text, lex, p);
      ASSERT_EQ(a.text, b.text);
      ASSERT_FALSE(text::trim(a.text).empty());
      if (t == Technique::SR) {
        ASSERT_EQ(text::tokenize(a.text).size(), text::tokenize(m.text).size());
      }
      if (t == Technique::RS) {
        ASSERT_EQ(sorted_tokens(a.text), sorted_tokens(m.text));
      }
    }
  }
}

TEST(Eda, AlphaValidation) {
  EXPECT_THROW(synonym_replacement("x y", SynonymLexicon::builtin(), seeded(1, 0.0)), Error);
  EXPECT_THROW(random_swap("x y", seeded(1, 1.5)), Error);
  EXPECT_NO_THROW(random_swap("x y", seeded(1, 1.0)));
}

TEST(Eda, VariantSeedsDiffer) {
  EXPECT_NE(variant_seed(1, "m1", Technique::SR, 1), variant_seed(1, "m1", Technique::SR, 2));
  EXPECT_NE(variant_seed(1, "m1", Technique::SR, 1), variant_seed(1, "m1", Technique::RI, 1));
  EXPECT_NE(variant_seed(1, "m1", Technique::SR, 1, 0), variant_seed(1, "m1", Technique::SR, 1, 1));
}
