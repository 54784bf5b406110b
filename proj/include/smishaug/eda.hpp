#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "smishaug/corpus.hpp"
#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/text.hpp"

namespace smishaug::eda {

enum class Technique : std::uint8_t { SR, RI, RS, RD };

inline std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::SR: return "sr";
    case Technique::RI: return "ri";
    case Technique::RS: return "rs";
    case Technique::RD: return "rd";
  }
  return "?";
}

inline std::optional<Technique> parse_technique(std::string_view s) {
  for (auto t : {Technique::SR, Technique::RI, Technique::RS, Technique::RD}) {
    if (text::iequals(text::trim(s), technique_name(t))) return t;
  }
  return std::nullopt;
}

inline Source technique_source(Technique t) {
  switch (t) {
    case Technique::SR: return Source::EdaSR;
    case Technique::RI: return Source::EdaRI;
    case Technique::RS: return Source::EdaRS;
    case Technique::RD: return Source::EdaRD;
  }
  return Source::EdaSR;
}

// Lookup key for a token: lowercased with leading/trailing punctuation removed.
inline std::string lexical_key(std::string_view token) {
  auto alnum = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  std::size_t b = 0, e = token.size();
  while (b < e && !alnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !alnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return text::to_lower(token.substr(b, e - b));
}

class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // Self-references are dropped; an entry left with no synonyms is rejected.
  void add(std::string_view word, const std::vector<std::string>& synonyms) {
    const auto key = lexical_key(word);
    if (key.empty()) throw Error(ErrorKind::Parse, "lexicon entry with empty headword");
    std::vector<std::string> kept;
    for (const auto& s : synonyms) {
      auto t = std::string(text::trim(s));
      if (t.empty() || text::iequals(t, key)) continue;
      if (text::tokenize(t).size() != 1) {
        throw Error(ErrorKind::Parse, "lexicon entry '" + key + "': synonym '" + t + "' must be a single token");
      }
      if (std::find(kept.begin(), kept.end(), t) == kept.end()) kept.push_back(t);
    }
    if (kept.empty()) throw Error(ErrorKind::Parse, "lexicon entry '" + key + "' lists no synonym other than itself");
    auto& slot = entries_[key];
    for (auto& s : kept) {
      if (std::find(slot.begin(), slot.end(), s) == slot.end()) slot.push_back(std::move(s));
    }
  }

  const std::vector<std::string>* lookup(std::string_view token) const {
    auto it = entries_.find(lexical_key(token));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

  // One entry per line: word<TAB>synonym,synonym,...  Lines starting with '#' are comments.
  static SynonymLexicon parse(std::istream& in, const std::string& origin = "<lexicon>") {
    SynonymLexicon lex;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto tab = t.find('\t');
      if (tab == std::string_view::npos) {
        throw Error(ErrorKind::Parse, origin + " line " + std::to_string(n) + ": expected word<TAB>synonyms");
      }
      try {
        lex.add(t.substr(0, tab), text::split(t.substr(tab + 1), ','));
      } catch (const Error& e) {
        throw Error(ErrorKind::Parse, origin + " line " + std::to_string(n) + ": " + e.what());
      }
    }
    return lex;
  }

  static SynonymLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open lexicon " + path.string());
    return parse(in, path.string());
  }

  // Small built-in lexicon of vocabulary common in SMS scams and promotions.
  static const SynonymLexicon& builtin() {
    static const SynonymLexicon lex = [] {
      std::istringstream in(
          "account\tbill,invoice,report\n"
          "act\tmove,proceed\n"
          "alert\twarning,notice,alarm\n"
          "block\tbar,freeze,stop\n"
          "bonus\treward,extra,premium\n"
          "call\tphone,ring,dial\n"
          "cash\tmoney,funds,currency\n"
          "check\tverify,confirm,examine\n"
          "claim\tcollect,take,obtain\n"
          "click\ttap,press,select\n"
          "confirm\tverify,validate,affirm\n"
          "contact\treach,call\n"
          "customer\tclient,patron,user\n"
          "dear\tbeloved,valued\n"
          "deal\toffer,bargain,discount\n"
          "delivery\tshipment,parcel,consignment\n"
          "exclusive\tspecial,select,private\n"
          "expire\tlapse,end\n"
          "fast\tquick,rapid,swift\n"
          "free\tcomplimentary,gratis,costless\n"
          "get\tobtain,receive,acquire\n"
          "immediately\tnow,instantly,promptly\n"
          "important\tcrucial,urgent,vital\n"
          "limited\trestricted,finite\n"
          "link\turl,address,hyperlink\n"
          "message\ttext,note,notice\n"
          "money\tcash,funds\n"
          "new\tfresh,latest,novel\n"
          "notice\tnotification,alert,announcement\n"
          "number\tline,digits\n"
          "office\tplace,billet,agency,bureau\n"
          "offer\tdeal,proposal,bid\n"
          "order\tpurchase,request\n"
          "package\tparcel,box,bundle\n"
          "payment\tpay,remittance,settlement\n"
          "pending\tawaiting,outstanding,unsettled\n"
          "phone\tmobile,telephone,handset\n"
          "prize\taward,reward,jackpot\n"
          "quick\tfast,rapid,speedy\n"
          "receive\tget,obtain,collect\n"
          "reply\trespond,answer\n"
          "reward\tprize,bonus,award\n"
          "secure\tprotect,safeguard,lock\n"
          "send\ttransmit,forward,text\n"
          "service\tsupport,assistance\n"
          "soon\tshortly,presently\n"
          "suspended\tfrozen,halted,blocked\n"
          "today\tnow,currently\n"
          "update\trefresh,renew,revise\n"
          "urgent\tpressing,critical,immediate\n"
          "valid\tgood,active,current\n"
          "verify\tconfirm,check,validate\n"
          "visit\topen,see,browse\n"
          "win\tgain,earn,bag\n"
          "winner\tvictor,champion\n"
          "within\tinside\n"
          "won\tgained,earned,secured\n");
      return parse(in, "<builtin lexicon>");
    }();
    return lex;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

using Stopwords = std::unordered_set<std::string>;

// The standard English stopword list used by the reference EDA implementation.
inline std::shared_ptr<const Stopwords> default_stopwords() {
  static const auto words = std::make_shared<const Stopwords>(Stopwords{
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
      "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
      "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
      "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
      "for", "with", "about", "against", "between", "into", "through", "during", "before",
      "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
      "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
      "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can",
      "will", "just", "don", "should", "now"});
  return words;
}

inline std::shared_ptr<const Stopwords> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open stopword file " + path.string());
  Stopwords words;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    words.insert(text::to_lower(t));
  }
  return std::make_shared<const Stopwords>(std::move(words));
}

struct EdaParams {
  double alpha = 0.1;
  std::uint64_t seed = 0;
  std::shared_ptr<const Stopwords> stopwords = default_stopwords();

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Invalid, "alpha must lie in (0, 1]");
    if (!stopwords) throw Error(ErrorKind::Invalid, "stopword set is null");
  }

  bool is_stopword(std::string_view token) const {
    return stopwords->count(lexical_key(token)) > 0;
  }
};

struct EdaResult {
  std::string text;
  std::size_t edits = 0;

  bool unchanged() const { return edits == 0; }
};

// Number of words to change: max(1, round-half-up(alpha * l)).
inline std::size_t change_count(double alpha, std::size_t length) {
  const auto n = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(length) + 0.5));
  return std::max<std::size_t>(1, n);
}

namespace detail {

// Positions of non-stopword tokens that have at least one synonym.
inline std::vector<std::size_t> replaceable_positions(const std::vector<std::string>& tokens,
                                                      const SynonymLexicon& lexicon,
                                                      const EdaParams& params) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!params.is_stopword(tokens[i]) && lexicon.lookup(tokens[i])) out.push_back(i);
  }
  return out;
}

// Swaps the core of `token` (between leading and trailing punctuation) for `word`.
inline std::string replace_core(const std::string& token, const std::string& word) {
  auto alnum = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  std::size_t b = 0, e = token.size();
  while (b < e && !alnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !alnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return token.substr(0, b) + word + token.substr(e);
}

}  // namespace detail

// Replaces min(n, replaceable) distinct tokens with a synonym each.
inline EdaResult synonym_replacement(std::string_view input, const SynonymLexicon& lexicon,
                                     const EdaParams& params) {
  params.validate();
  auto tokens = text::tokenize(input);
  if (tokens.empty()) return {std::string(input), 0};
  const auto n = change_count(params.alpha, tokens.size());
  auto candidates = detail::replaceable_positions(tokens, lexicon, params);
  if (candidates.empty()) return {std::string(input), 0};

  Rng rng(params.seed);
  rng.shuffle(candidates.begin(), candidates.end());
  const auto replace = std::min(n, candidates.size());
  for (std::size_t k = 0; k < replace; ++k) {
    auto& tok = tokens[candidates[k]];
    const auto& syns = *lexicon.lookup(tok);
    tok = detail::replace_core(tok, syns[rng.below(syns.size())]);
  }
  return {text::join(tokens), replace};
}

// Inserts n synonyms of randomly chosen non-stopword tokens at random positions.
inline EdaResult random_insertion(std::string_view input, const SynonymLexicon& lexicon,
                                  const EdaParams& params) {
  params.validate();
  auto tokens = text::tokenize(input);
  if (tokens.empty()) return {std::string(input), 0};
  const auto n = change_count(params.alpha, tokens.size());
  const auto sources = detail::replaceable_positions(tokens, lexicon, params);
  if (sources.empty()) return {std::string(input), 0};

  const auto original = tokens;
  Rng rng(params.seed);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& src = original[sources[rng.below(sources.size())]];
    const auto& syns = *lexicon.lookup(src);
    auto word = syns[rng.below(syns.size())];
    const auto pos = rng.below(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), std::move(word));
  }
  return {text::join(tokens), n};
}

// Performs n swaps of two uniformly drawn positions (which may coincide).
inline EdaResult random_swap(std::string_view input, const EdaParams& params) {
  params.validate();
  auto tokens = text::tokenize(input);
  if (tokens.size() < 2) return {std::string(input), 0};
  const auto n = change_count(params.alpha, tokens.size());
  Rng rng(params.seed);
  std::size_t effective = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = rng.below(tokens.size());
    const auto j = rng.below(tokens.size());
    if (i != j) ++effective;
    std::swap(tokens[i], tokens[j]);
  }
  return {text::join(tokens), effective};
}

// Drops each token independently with probability p; never returns an empty text.
inline EdaResult random_deletion_with_probability(std::string_view input, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Invalid, "deletion probability must lie in [0, 1]");
  auto tokens = text::tokenize(input);
  if (tokens.size() < 2) return {std::string(input), 0};
  Rng rng(seed);
  std::vector<std::string> kept;
  for (auto& tok : tokens) {
    if (rng.unit() >= p) kept.push_back(tok);
  }
  if (kept.empty()) kept.push_back(tokens[rng.below(tokens.size())]);
  const auto deleted = tokens.size() - kept.size();
  return {text::join(kept), deleted};
}

inline EdaResult random_deletion(std::string_view input, const EdaParams& params) {
  params.validate();
  return random_deletion_with_probability(input, params.alpha, params.seed);
}

inline EdaResult apply(Technique t, std::string_view input, const SynonymLexicon& lexicon,
                       const EdaParams& params) {
  switch (t) {
    case Technique::SR: return synonym_replacement(input, lexicon, params);
    case Technique::RI: return random_insertion(input, lexicon, params);
    case Technique::RS: return random_swap(input, params);
    case Technique::RD: return random_deletion(input, params);
  }
  return {std::string(input), 0};
}

// Per-variant seed: independent of processing order.
inline std::uint64_t variant_seed(std::uint64_t run_seed, std::string_view message_id, Technique t,
                                  std::size_t variant, std::size_t attempt = 0) {
  return derive_seed(run_seed, {"eda", message_id, technique_name(t), std::to_string(variant),
                                std::to_string(attempt)});
}

}  // namespace smishaug::eda
