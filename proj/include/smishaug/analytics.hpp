#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "smishaug/csv.hpp"
#include "smishaug/error.hpp"
#include "smishaug/text.hpp"

namespace smishaug {

struct TextStats {
  double avg = 0.0;
  double std = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t n = 0;
};

enum class StdKind { Population, Sample };

struct DescribeOptions {
  StdKind std_kind = StdKind::Population;
  bool trim = false;  // count the stored text as-is unless asked to trim
};

inline TextStats summarize(const std::vector<std::size_t>& values, StdKind kind = StdKind::Population) {
  if (values.empty()) throw Error(ErrorKind::Invalid, "cannot describe an empty list");
  TextStats s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.front();
  // Exact integer moments, so equal rationals give bit-identical results.
  unsigned __int128 sum = 0, sum_sq = 0;
  for (auto v : values) {
    sum += v;
    sum_sq += static_cast<unsigned __int128>(v) * v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  const unsigned __int128 n = s.n;
  const unsigned __int128 spread = n * sum_sq - sum * sum;  // n^2 * population variance
  const unsigned __int128 denom = kind == StdKind::Population ? n * n : n * (n > 1 ? n - 1 : 1);
  s.avg = static_cast<double>(static_cast<long double>(sum) / static_cast<long double>(n));
  s.std = static_cast<double>(std::sqrt(static_cast<long double>(spread) / static_cast<long double>(denom)));
  return s;
}

struct CorpusStats {
  TextStats chars;
  TextStats words;
};

// Character counts are unicode scalar counts; word counts are whitespace tokens.
inline CorpusStats describe(const std::vector<std::string>& texts, const DescribeOptions& opts = {}) {
  if (texts.empty()) throw Error(ErrorKind::Invalid, "cannot describe an empty list");
  std::vector<std::size_t> chars, words;
  chars.reserve(texts.size());
  words.reserve(texts.size());
  for (const auto& t : texts) {
    const std::string_view s = opts.trim ? text::trim(t) : std::string_view(t);
    chars.push_back(text::utf8_length(s));
    words.push_back(text::word_count(s));
  }
  return {summarize(chars, opts.std_kind), summarize(words, opts.std_kind)};
}

struct StatsRow {
  std::string dataset;
  CorpusStats stats;
};

inline void render_stats_text(std::ostream& out, const std::vector<StatsRow>& rows, StdKind kind) {
  out << "# std: " << (kind == StdKind::Population ? "population (divide by n)" : "sample (divide by n-1)")
      << "\n";
  for (int block = 0; block < 2; ++block) {
    out << (block == 0 ? "char count" : "word count") << "\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %10s %10s %8s %8s\n", "", "Avg", "Std", "Min", "Max");
    out << line;
    for (const auto& r : rows) {
      const auto& s = block == 0 ? r.stats.chars : r.stats.words;
      std::snprintf(line, sizeof line, "%-28s %10.2f %10.2f %8zu %8zu\n", r.dataset.c_str(), s.avg, s.std,
                    s.min, s.max);
      out << line;
    }
  }
}

inline void render_stats_csv(std::ostream& out, const std::vector<StatsRow>& rows) {
  csv::write_row(out, {"dataset", "char_avg", "char_std", "char_min", "char_max", "word_avg", "word_std",
                       "word_min", "word_max", "n"});
  for (const auto& r : rows) {
    const auto& c = r.stats.chars;
    const auto& w = r.stats.words;
    csv::write_row(out, {r.dataset, text::fixed(c.avg, 2), text::fixed(c.std, 2), std::to_string(c.min),
                         std::to_string(c.max), text::fixed(w.avg, 2), text::fixed(w.std, 2),
                         std::to_string(w.min), std::to_string(w.max), std::to_string(c.n)});
  }
}

}  // namespace smishaug
