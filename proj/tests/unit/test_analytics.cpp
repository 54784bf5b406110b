#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"

using namespace smishaug;

namespace {

std::vector<std::string> five_texts() {
  std::vector<std::string> out;
  for (const auto& m : load_corpus(testkit::test_data("five_texts.csv"), CorpusFormat::Csv, false).messages) {
    out.push_back(m.text);
  }
  return out;
}

}  // namespace

TEST(Describe, FiveTextOracle) {
  auto s = describe(five_texts());
  EXPECT_DOUBLE_EQ(s.chars.avg, 12.4);
  EXPECT_NEAR(s.chars.std, std::sqrt(50.64), 1e-12);
  EXPECT_EQ(s.chars.min, 2u);
  EXPECT_EQ(s.chars.max, 23u);
  EXPECT_DOUBLE_EQ(s.words.avg, 2.6);
  EXPECT_NEAR(s.words.std, std::sqrt(1.04), 1e-12);
  EXPECT_EQ(s.words.min, 1u);
  EXPECT_EQ(s.words.max, 4u);
  EXPECT_EQ(s.chars.n, 5u);
}

TEST(Describe, SampleStdUsesNMinusOne) {
  auto s = describe(five_texts(), {StdKind::Sample, false});
  EXPECT_NEAR(s.chars.std, std::sqrt(50.64 * 5 / 4), 1e-12);
}

TEST(Describe, IdenticalTextsHaveZeroSpread) {
  auto s = describe({"ab", "ab"});
  EXPECT_DOUBLE_EQ(s.chars.avg, 2.0);
  EXPECT_DOUBLE_EQ(s.chars.std, 0.0);
  EXPECT_DOUBLE_EQ(s.words.avg, 1.0);
  EXPECT_DOUBLE_EQ(s.words.std, 0.0);
}

TEST(Describe, DuplicatedListIsInvariant) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::string> x;
    for (std::uint64_t i = 0, n = 1 + rng.below(12); i < n; ++i) {
      std::string s;
      for (std::uint64_t w = 0, k = rng.below(9); w < k; ++w) s += std::string(1 + rng.below(7), 'a') + " ";
      x.push_back(s);
    }
    auto xx = x;
    xx.insert(xx.end(), x.begin(), x.end());
    auto a = describe(x), b = describe(xx);
    ASSERT_EQ(a.chars.avg, b.chars.avg);
    ASSERT_EQ(a.chars.std, b.chars.std);
    ASSERT_EQ(a.words.avg, b.words.avg);
    ASSERT_EQ(a.words.std, b.words.std);
  }
}

TEST(Describe, TrimOption) {
  EXPECT_EQ(describe({"  ab  "}).chars.max, 6u);
  EXPECT_EQ(describe({"  ab  "}, {StdKind::Population, true}).chars.max, 2u);
  EXPECT_THROW(describe({}), Error);
}

TEST(Describe, RenderedTablesUseTwoDecimals) {
  std::vector<StatsRow> rows{{"five", describe(five_texts())}};
  std::ostringstream txt, csvout;
  render_stats_text(txt, rows, StdKind::Population);
  render_stats_csv(csvout, rows);
  EXPECT_NE(txt.str().find("12.40"), std::string::npos);
  EXPECT_NE(txt.str().find("7.12"), std::string::npos);
  EXPECT_NE(txt.str().find("2.60"), std::string::npos);
  EXPECT_NE(txt.str().find("1.02"), std::string::npos);
  EXPECT_NE(txt.str().find("population"), std::string::npos);
  EXPECT_NE(csvout.str().find("five,12.40,7.12,2,23,2.60,1.02,1,4,5"), std::string::npos);
}
