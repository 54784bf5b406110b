#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "smishaug/csv.hpp"
#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/principle.hpp"
#include "smishaug/text.hpp"

namespace smishaug {

enum class Label : std::uint8_t { Smishing, Spam, Ham };

enum class Source : std::uint8_t { Original, EdaSR, EdaRI, EdaRS, EdaRD, LlmTheory, LlmPlain };

enum class CorpusFormat { Csv, Jsonl };

inline std::string_view label_name(Label l) {
  switch (l) {
    case Label::Smishing: return "smishing";
    case Label::Spam: return "spam";
    case Label::Ham: return "ham";
  }
  return "?";
}

// Published variants of the benchmark spell the smishing label both ways.
inline std::optional<Label> parse_label(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "smishing") || text::iequals(s, "smish")) return Label::Smishing;
  if (text::iequals(s, "spam")) return Label::Spam;
  if (text::iequals(s, "ham")) return Label::Ham;
  return std::nullopt;
}

inline std::string_view source_name(Source s) {
  switch (s) {
    case Source::Original: return "original";
    case Source::EdaSR: return "eda-sr";
    case Source::EdaRI: return "eda-ri";
    case Source::EdaRS: return "eda-rs";
    case Source::EdaRD: return "eda-rd";
    case Source::LlmTheory: return "llm-theory";
    case Source::LlmPlain: return "llm-plain";
  }
  return "?";
}

inline std::optional<Source> parse_source(std::string_view s) {
  s = text::trim(s);
  for (auto src : {Source::Original, Source::EdaSR, Source::EdaRI, Source::EdaRS, Source::EdaRD,
                   Source::LlmTheory, Source::LlmPlain}) {
    if (text::iequals(s, source_name(src))) return src;
  }
  return std::nullopt;
}

inline bool is_eda(Source s) {
  return s == Source::EdaSR || s == Source::EdaRI || s == Source::EdaRS || s == Source::EdaRD;
}

inline bool is_llm(Source s) { return s == Source::LlmTheory || s == Source::LlmPlain; }

struct Message {
  std::string id;
  std::string text;
  Label label = Label::Smishing;
  Source source = Source::Original;
  std::optional<Principle> principle;
  std::optional<std::string> parent_id;
  std::optional<std::string> prompt_id;

  friend bool operator==(const Message&, const Message&) = default;
};

// Checks the per-message provenance invariants; returns an empty string when valid.
inline std::string message_violation(const Message& m) {
  if (m.id.empty()) return "empty id";
  if (text::trim(m.text).empty()) return "text is empty after trimming";
  if (m.source == Source::Original && (m.parent_id || m.prompt_id)) {
    return "original message carries parent_id or prompt_id";
  }
  if (is_eda(m.source) && !m.parent_id) return "EDA message without parent_id";
  if (is_llm(m.source) && !m.prompt_id) return "LLM message without prompt_id";
  return {};
}

struct Corpus {
  std::vector<Message> messages;

  std::size_t size() const { return messages.size(); }
  bool empty() const { return messages.empty(); }

  std::size_t count(Label l) const {
    return static_cast<std::size_t>(std::count_if(
        messages.begin(), messages.end(), [l](const Message& m) { return m.label == l; }));
  }

  std::unordered_map<std::string, std::size_t> index() const {
    std::unordered_map<std::string, std::size_t> idx;
    idx.reserve(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) idx.emplace(messages[i].id, i);
    return idx;
  }

  // Messages whose id is in `ids`, in corpus order.
  Corpus subset(const std::vector<std::string>& ids) const {
    std::unordered_set<std::string> wanted(ids.begin(), ids.end());
    Corpus out;
    for (const auto& m : messages) {
      if (wanted.count(m.id)) out.messages.push_back(m);
    }
    if (out.size() != wanted.size()) {
      throw Error(ErrorKind::Invalid, "subset references ids missing from the corpus");
    }
    return out;
  }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(messages.size());
    for (const auto& m : messages) out.push_back(m.text);
    return out;
  }
};

// Unique ids, per-message invariants, and EDA parents resolving to originals in the corpus.
inline void validate_corpus(const Corpus& corpus) {
  std::unordered_map<std::string, const Message*> by_id;
  for (const auto& m : corpus.messages) {
    if (auto v = message_violation(m); !v.empty()) {
      throw Error(ErrorKind::Invalid, "message '" + m.id + "': " + v);
    }
    if (!by_id.emplace(m.id, &m).second) {
      throw Error(ErrorKind::Invalid, "duplicate message id '" + m.id + "'");
    }
  }
  for (const auto& m : corpus.messages) {
    if (!m.parent_id) continue;
    auto it = by_id.find(*m.parent_id);
    if (it == by_id.end() || it->second->source != Source::Original) {
      throw Error(ErrorKind::Invalid,
                  "message '" + m.id + "': parent '" + *m.parent_id + "' is not an original in this corpus");
    }
  }
}

namespace detail {

inline nlohmann::ordered_json message_to_json(const Message& m) {
  nlohmann::ordered_json j;
  j["id"] = m.id;
  j["text"] = m.text;
  j["label"] = label_name(m.label);
  j["source"] = source_name(m.source);
  j["principle"] = m.principle ? nlohmann::ordered_json(principle_code(*m.principle)) : nullptr;
  j["parent_id"] = m.parent_id ? nlohmann::ordered_json(*m.parent_id) : nullptr;
  j["prompt_id"] = m.prompt_id ? nlohmann::ordered_json(*m.prompt_id) : nullptr;
  return j;
}

inline std::optional<std::string> optional_field(const std::string& s) {
  if (text::trim(s).empty()) return std::nullopt;
  return std::string(text::trim(s));
}

// Builds a message from raw column values; `where` prefixes error messages.
inline Message make_message(const std::string& where, std::optional<std::string> id,
                            const std::string& raw_text, const std::string& raw_label,
                            const std::string& raw_source, const std::string& raw_principle,
                            std::optional<std::string> parent_id,
                            std::optional<std::string> prompt_id) {
  Message m;
  m.text = raw_text;
  if (text::trim(m.text).empty()) throw Error(ErrorKind::Parse, where + ": empty text");
  auto label = parse_label(raw_label);
  if (!label) throw Error(ErrorKind::Parse, where + ": unknown label '" + raw_label + "'");
  m.label = *label;
  if (!text::trim(raw_source).empty()) {
    auto src = parse_source(raw_source);
    if (!src) throw Error(ErrorKind::Parse, where + ": unknown source '" + raw_source + "'");
    m.source = *src;
  }
  if (!text::trim(raw_principle).empty()) {
    auto p = parse_principle(raw_principle);
    if (!p) throw Error(ErrorKind::Parse, where + ": unknown principle '" + raw_principle + "'");
    m.principle = *p;
  }
  m.parent_id = std::move(parent_id);
  m.prompt_id = std::move(prompt_id);
  if (id) m.id = *id;
  return m;
}

inline std::string json_string_or_empty(const nlohmann::json& obj, const char* key,
                                        const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(ErrorKind::Parse, where + ": field '" + key + "' is not a string");
  return it->get<std::string>();
}

}  // namespace detail

inline std::string default_message_id(std::size_t data_row) { return "m" + text::zero_pad(data_row, 5); }

// Loads a CSV (header row with text and label columns) or JSONL corpus.
// Ids absent from the file are assigned from the 1-based data row number,
// counted before Ham filtering so they stay stable under drop_ham.
inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, bool drop_ham) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open corpus file " + path.string());

  Corpus corpus;
  std::size_t data_rows = 0;
  auto accept = [&](Message m) {
    if (drop_ham && m.label == Label::Ham) return;
    corpus.messages.push_back(std::move(m));
  };

  if (format == CorpusFormat::Csv) {
    auto records = csv::read(in);
    if (records.empty()) throw Error(ErrorKind::Parse, path.string() + ": no rows");
    const auto& header = records.front().fields;
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (text::iequals(text::trim(header[i]), name)) return i;
      }
      return std::nullopt;
    };
    auto text_col = column("text");
    auto label_col = column("label");
    if (!text_col || !label_col) {
      throw Error(ErrorKind::Parse, path.string() + ": header must contain text and label columns");
    }
    auto id_col = column("id"), source_col = column("source"), principle_col = column("principle"),
         parent_col = column("parent_id"), prompt_col = column("prompt_id");
    if (records.size() == 1) throw Error(ErrorKind::Parse, path.string() + ": no rows");

    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      ++data_rows;
      const std::string where = path.string() + " row " + std::to_string(data_rows) + " (line " +
                                std::to_string(rec.line) + ")";
      const std::size_t needed = std::max(*text_col, *label_col) + 1;
      if (rec.fields.size() < needed) {
        throw Error(ErrorKind::Parse, where + ": malformed row, expected at least " +
                                          std::to_string(needed) + " fields");
      }
      auto get = [&](std::optional<std::size_t> col) -> std::string {
        if (!col || *col >= rec.fields.size()) return {};
        return rec.fields[*col];
      };
      auto id = detail::optional_field(get(id_col));
      if (!id) id = default_message_id(data_rows);
      accept(detail::make_message(where, id, rec.fields[*text_col], rec.fields[*label_col],
                                  get(source_col), get(principle_col),
                                  detail::optional_field(get(parent_col)),
                                  detail::optional_field(get(prompt_col))));
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      ++data_rows;
      const std::string where = path.string() + " line " + std::to_string(line_no);
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, where + ": malformed JSON: " + e.what());
      }
      if (!obj.is_object() || !obj.contains("text") || !obj.contains("label")) {
        throw Error(ErrorKind::Parse, where + ": malformed row, expected object with text and label");
      }
      auto id = detail::optional_field(detail::json_string_or_empty(obj, "id", where));
      if (!id) id = default_message_id(data_rows);
      accept(detail::make_message(
          where, id, detail::json_string_or_empty(obj, "text", where),
          detail::json_string_or_empty(obj, "label", where),
          detail::json_string_or_empty(obj, "source", where),
          detail::json_string_or_empty(obj, "principle", where),
          detail::optional_field(detail::json_string_or_empty(obj, "parent_id", where)),
          detail::optional_field(detail::json_string_or_empty(obj, "prompt_id", where))));
    }
    if (data_rows == 0) throw Error(ErrorKind::Parse, path.string() + ": no rows");
  }

  std::unordered_set<std::string> seen;
  for (const auto& m : corpus.messages) {
    if (!seen.insert(m.id).second) throw Error(ErrorKind::Parse, "duplicate message id '" + m.id + "'");
  }
  return corpus;
}

inline CorpusFormat format_from_path(const std::filesystem::path& path) {
  auto ext = text::to_lower(path.extension().string());
  return ext == ".csv" ? CorpusFormat::Csv : CorpusFormat::Jsonl;
}

inline Corpus load_corpus(const std::filesystem::path& path, bool drop_ham = true) {
  return load_corpus(path, format_from_path(path), drop_ham);
}

inline std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& m : corpus.messages) {
    out += detail::message_to_json(m).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

inline void save_corpus(const std::filesystem::path& path, const Corpus& corpus, CorpusFormat format) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  if (format == CorpusFormat::Jsonl) {
    out << to_jsonl(corpus);
  } else {
    csv::write_row(out, {"id", "text", "label", "source", "principle", "parent_id", "prompt_id"});
    for (const auto& m : corpus.messages) {
      csv::write_row(out, {m.id, m.text, std::string(label_name(m.label)),
                           std::string(source_name(m.source)),
                           m.principle ? std::string(principle_code(*m.principle)) : "",
                           m.parent_id.value_or(""), m.prompt_id.value_or("")});
    }
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

inline void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  save_corpus(path, corpus, format_from_path(path));
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

struct FoldPlan {
  int repeat_index = 0;
  std::vector<std::string> train_ids;  // corpus order
  std::vector<std::string> test_ids;   // corpus order
  std::uint64_t seed = 0;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

// Disjoint, label-stratified k-fold partition. Each label's messages are
// shuffled independently, then the label groups are dealt round-robin as one
// continuous sequence, so per-label fold sizes differ by at most one and so do
// total fold sizes.
inline std::vector<FoldPlan> make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Invalid, "k must be at least 2");
  if (corpus.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::Invalid, "corpus has " + std::to_string(corpus.size()) +
                                        " messages, fewer than k=" + std::to_string(k));
  }
  std::vector<int> fold_of(corpus.size(), 0);
  std::size_t dealt = 0;
  for (auto label : {Label::Smishing, Label::Spam, Label::Ham}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus.messages[i].label == label) members.push_back(i);
    }
    Rng rng(derive_seed(seed, {"folds", label_name(label)}));
    rng.shuffle(members.begin(), members.end());
    for (auto idx : members) fold_of[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }

  std::vector<FoldPlan> folds(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    auto& plan = folds[static_cast<std::size_t>(f)];
    plan.repeat_index = f;
    plan.seed = seed;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      (fold_of[i] == f ? plan.test_ids : plan.train_ids).push_back(corpus.messages[i].id);
    }
  }
  return folds;
}

inline nlohmann::ordered_json folds_to_json(const std::vector<FoldPlan>& folds) {
  nlohmann::ordered_json j;
  j["k"] = folds.size();
  j["seed"] = folds.empty() ? 0 : folds.front().seed;
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    nlohmann::ordered_json fj;
    fj["repeat_index"] = f.repeat_index;
    fj["seed"] = f.seed;
    fj["train_ids"] = f.train_ids;
    fj["test_ids"] = f.test_ids;
    j["folds"].push_back(std::move(fj));
  }
  return j;
}

inline std::vector<FoldPlan> folds_from_json(const nlohmann::json& j) {
  std::vector<FoldPlan> folds;
  try {
    for (const auto& fj : j.at("folds")) {
      FoldPlan f;
      f.repeat_index = fj.at("repeat_index").get<int>();
      f.seed = fj.at("seed").get<std::uint64_t>();
      f.train_ids = fj.at("train_ids").get<std::vector<std::string>>();
      f.test_ids = fj.at("test_ids").get<std::vector<std::string>>();
      folds.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed folds file: ") + e.what());
  }
  return folds;
}

inline std::vector<FoldPlan> load_folds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open folds file " + path.string());
  try {
    return folds_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace smishaug
