#include <gtest/gtest.h>

#include <set>

#include "smishaug/hash.hpp"
#include "smishaug/text.hpp"

using namespace smishaug;

TEST(Text, TrimAndTokenize) {
  EXPECT_EQ(text::trim("  a b \n"), "a b");
  EXPECT_EQ(text::trim(" \t\r\n"), "");
  EXPECT_EQ(text::tokenize("  one\ttwo  three\n"), (std::vector<std::string>{"one", "two", "three"}));
  EXPECT_EQ(text::word_count("  one\ttwo  three\n"), 3u);
  EXPECT_EQ(text::word_count(""), 0u);
}

TEST(Text, Utf8LengthCountsScalars) {
  EXPECT_EQ(text::utf8_length("abc"), 3u);
  EXPECT_EQ(text::utf8_length("h\xC3\xA9llo"), 5u);         // é
  EXPECT_EQ(text::utf8_length("\xE2\x82\xAC" "5"), 2u);      // €5
  EXPECT_EQ(text::utf8_length("\xF0\x9F\x98\x80"), 1u);      // emoji
}

TEST(Text, NormalizeFoldsCaseAndWhitespace) {
  EXPECT_EQ(text::normalize("  Hello   WORLD\t!  "), "hello world !");
  EXPECT_EQ(text::normalize("a\n\nb"), text::normalize("A b"));
}

TEST(Text, FixedAndZeroPad) {
  EXPECT_EQ(text::fixed(1.0, 3), "1.000");
  EXPECT_EQ(text::fixed(0.2592592, 3), "0.259");
  EXPECT_EQ(text::zero_pad(42, 5), "00042");
}

TEST(Hash, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Hash, DeriveSeedSeparatesParts) {
  EXPECT_NE(derive_seed(1, {"ab", "c"}), derive_seed(1, {"a", "bc"}));
  EXPECT_NE(derive_seed(1, {"x"}), derive_seed(2, {"x"}));
  EXPECT_EQ(derive_seed(7, {"x", "y"}), derive_seed(7, {"x", "y"}));
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, UnitInHalfOpenInterval) {
  Rng rng(4);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Rng, ShuffleIsPermutationAndSeeded) {
  std::vector<int> a(50), b;
  for (int i = 0; i < 50; ++i) a[i] = i;
  b = a;
  Rng r1(11), r2(11);
  r1.shuffle(a.begin(), a.end());
  r2.shuffle(b.begin(), b.end());
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}
