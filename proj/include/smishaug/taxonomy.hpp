#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smishaug/corpus.hpp"
#include "smishaug/csv.hpp"
#include "smishaug/error.hpp"
#include "smishaug/principle.hpp"

namespace smishaug {

struct AnnotationRecord {
  std::string message_id;
  std::string annotator_id;
  Principle principle = Principle::Authority;
};

using VoteHistogram = std::array<int, kPrincipleCount>;

struct AggregationResult {
  std::string message_id;
  std::optional<Principle> decided;  // nullopt means Unresolved
  VoteHistogram votes{};

  bool resolved() const { return decided.has_value(); }
  int annotators() const {
    int n = 0;
    for (int v : votes) n += v;
    return n;
  }
};

namespace detail {

inline std::map<std::string, VoteHistogram> tally(const std::vector<AnnotationRecord>& records) {
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::string, VoteHistogram> hist;
  for (const auto& r : records) {
    if (!seen.emplace(r.message_id, r.annotator_id).second) {
      throw Error(ErrorKind::Invalid, "duplicate annotation by '" + r.annotator_id +
                                          "' for message '" + r.message_id + "'");
    }
    hist[r.message_id][principle_index(r.principle)] += 1;
  }
  return hist;
}

}  // namespace detail

// Resolves each message to the principle with the most votes when that count
// reaches `threshold` and is not tied. Results are ordered by message id, so
// record order never matters.
inline std::vector<AggregationResult> majority_vote(const std::vector<AnnotationRecord>& records,
                                                    int threshold = 3) {
  if (threshold < 1) throw Error(ErrorKind::Invalid, "threshold must be at least 1");
  std::vector<AggregationResult> out;
  for (const auto& [id, votes] : detail::tally(records)) {
    AggregationResult res{id, std::nullopt, votes};
    const auto best = std::max_element(votes.begin(), votes.end());
    const auto ties = std::count(votes.begin(), votes.end(), *best);
    if (*best >= threshold && ties == 1) {
      res.decided = static_cast<Principle>(best - votes.begin());
    }
    out.push_back(std::move(res));
  }
  return out;
}

// Same as above, but every id in `required_ids` must have at least one annotation.
inline std::vector<AggregationResult> majority_vote(const std::vector<AnnotationRecord>& records,
                                                    int threshold,
                                                    const std::vector<std::string>& required_ids) {
  auto results = majority_vote(records, threshold);
  std::set<std::string> have;
  for (const auto& r : results) have.insert(r.message_id);
  for (const auto& id : required_ids) {
    if (!have.count(id)) throw Error(ErrorKind::Invalid, "message '" + id + "' has zero annotations");
  }
  return results;
}

// Fleiss' kappa over an items x categories count matrix. Computed from exact
// integer sums so the result does not depend on item or category order.
inline double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.size() < 2) throw Error(ErrorKind::Invalid, "Fleiss' kappa needs at least 2 rated items");
  const std::size_t categories = counts.front().size();
  long long raters = -1;
  std::vector<long long> column(categories, 0);
  __int128 sum_sq = 0;
  for (const auto& row : counts) {
    if (row.size() != categories) throw Error(ErrorKind::Invalid, "ragged count matrix");
    long long n = 0;
    for (std::size_t j = 0; j < categories; ++j) {
      if (row[j] < 0) throw Error(ErrorKind::Invalid, "negative rating count");
      n += row[j];
      column[j] += row[j];
      sum_sq += static_cast<__int128>(row[j]) * row[j];
    }
    if (raters < 0) raters = n;
    if (n != raters) throw Error(ErrorKind::Invalid, "items have unequal numbers of ratings");
  }
  if (raters < 2) throw Error(ErrorKind::Invalid, "Fleiss' kappa needs at least 2 raters per item");

  const __int128 items = static_cast<__int128>(counts.size());
  const __int128 total = items * raters;
  // P_bar = A / B, P_e = C / D
  const __int128 a = sum_sq - total;
  const __int128 b = total * (raters - 1);
  __int128 c = 0;
  for (auto col : column) c += static_cast<__int128>(col) * col;
  const __int128 d = total * total;
  if (c == d) {
    throw Error(ErrorKind::Invalid, "Fleiss' kappa undefined: expected agreement is 1 (one category used)");
  }
  const __int128 num = a * d - c * b;
  const __int128 den = b * (d - c);
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

inline double fleiss_kappa(const std::vector<AnnotationRecord>& records,
                           std::size_t categories = kPrincipleCount) {
  if (categories < kPrincipleCount) {
    throw Error(ErrorKind::Invalid, "categories must cover all principle codes");
  }
  std::vector<std::vector<int>> matrix;
  for (const auto& [id, votes] : detail::tally(records)) {
    std::vector<int> row(categories, 0);
    std::copy(votes.begin(), votes.end(), row.begin());
    matrix.push_back(std::move(row));
  }
  return fleiss_kappa(matrix);
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open annotation file " + path.string());
  std::vector<AnnotationRecord> out;
  auto make = [&](const std::string& where, const std::string& mid, const std::string& aid,
                  const std::string& code) {
    auto p = parse_principle(code);
    if (!p) throw Error(ErrorKind::Parse, where + ": unknown principle '" + code + "'");
    if (text::trim(mid).empty() || text::trim(aid).empty()) {
      throw Error(ErrorKind::Parse, where + ": empty message_id or annotator_id");
    }
    out.push_back({std::string(text::trim(mid)), std::string(text::trim(aid)), *p});
  };

  if (format_from_path(path) == CorpusFormat::Csv) {
    auto records = csv::read(in);
    if (records.empty()) throw Error(ErrorKind::Parse, path.string() + ": no rows");
    const auto& header = records.front().fields;
    auto col = [&](std::string_view name) -> std::size_t {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (text::iequals(text::trim(header[i]), name)) return i;
      }
      throw Error(ErrorKind::Parse, path.string() + ": missing column '" + std::string(name) + "'");
    };
    const auto mc = col("message_id"), ac = col("annotator_id"), pc = col("principle");
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& f = records[r].fields;
      const std::string where = path.string() + " row " + std::to_string(r + 1);
      if (f.size() <= std::max({mc, ac, pc})) throw Error(ErrorKind::Parse, where + ": malformed row");
      make(where, f[mc], f[ac], f[pc]);
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const std::string where = path.string() + " line " + std::to_string(line_no);
      try {
        auto j = nlohmann::json::parse(line);
        make(where, j.at("message_id").get<std::string>(), j.at("annotator_id").get<std::string>(),
             j.at("principle").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, where + ": " + e.what());
      }
    }
  }
  return out;
}

// Manual consensus decisions: CSV with message_id, principle.
inline std::map<std::string, Principle> load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open override file " + path.string());
  std::map<std::string, Principle> out;
  auto records = csv::read(in);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (r == 0 && !f.empty() && text::iequals(text::trim(f[0]), "message_id")) continue;
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    if (f.size() < 2) throw Error(ErrorKind::Parse, where + ": malformed row");
    auto p = parse_principle(f[1]);
    if (!p) throw Error(ErrorKind::Parse, where + ": unknown principle '" + f[1] + "'");
    out[std::string(text::trim(f[0]))] = *p;
  }
  return out;
}

// Final message -> principle map. Overrides win; Unresolved items without an
// override are left out.
inline std::map<std::string, Principle> resolve_principles(
    const std::vector<AggregationResult>& results, const std::map<std::string, Principle>& overrides = {}) {
  std::map<std::string, Principle> out;
  for (const auto& r : results) {
    if (r.decided) out[r.message_id] = *r.decided;
  }
  for (const auto& [id, p] : overrides) out[id] = p;
  return out;
}

// Copies resolved principles onto the matching smishing messages.
inline Corpus apply_principles(Corpus corpus, const std::map<std::string, Principle>& principles) {
  for (auto& m : corpus.messages) {
    if (m.label != Label::Smishing) continue;
    if (auto it = principles.find(m.id); it != principles.end()) m.principle = it->second;
  }
  return corpus;
}

inline void write_aggregation(std::ostream& out, const std::vector<AggregationResult>& results) {
  csv::write_row(out, {"message_id", "decided", "P1", "P2", "P3", "P4", "P5"});
  for (const auto& r : results) {
    std::vector<std::string> row{r.message_id,
                                 r.decided ? std::string(principle_code(*r.decided)) : "unresolved"};
    for (int v : r.votes) row.push_back(std::to_string(v));
    csv::write_row(out, row);
  }
}

}  // namespace smishaug
