#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "smishaug/corpus.hpp"
#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/text.hpp"

namespace smishaug {

enum class RejectReason : std::uint8_t {
  Ok,
  Empty,
  TooShort,
  TooLong,
  Placeholder,
  NoActionableArtifact,
  Duplicate,
};

inline constexpr std::array<RejectReason, 7> kAllReasons = {
    RejectReason::Ok,          RejectReason::Empty,
    RejectReason::TooShort,    RejectReason::TooLong,
    RejectReason::Placeholder, RejectReason::NoActionableArtifact,
    RejectReason::Duplicate};

inline std::string_view reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::Ok: return "ok";
    case RejectReason::Empty: return "empty";
    case RejectReason::TooShort: return "too_short";
    case RejectReason::TooLong: return "too_long";
    case RejectReason::Placeholder: return "placeholder";
    case RejectReason::NoActionableArtifact: return "no_actionable_artifact";
    case RejectReason::Duplicate: return "duplicate";
  }
  return "?";
}

struct ValidationVerdict {
  bool accepted = false;
  RejectReason reason = RejectReason::Empty;

  static ValidationVerdict ok() { return {true, RejectReason::Ok}; }
  static ValidationVerdict reject(RejectReason r) { return {false, r}; }
};

inline const std::vector<std::string>& default_placeholder_patterns() {
  static const std::vector<std::string> p = {R"(\[[^\]]{1,40}\])", R"(\{[^}]{1,40}\})",
                                             R"(<[A-Za-z _]{1,40}>)"};
  return p;
}

// Scheme URLs, www hosts, and bare domains on common SMS-scam TLDs.
inline constexpr const char* kDefaultUrlPattern =
    R"((https?://[^\s]+)|(www\.[^\s]+)|(\b[a-z0-9][a-z0-9-]*(\.[a-z0-9-]+)*\.(com|net|org|info|biz|co|uk|in|ly|me|io|xyz|link|top|site|online|club|app|example)(/[^\s]*)?\b))";

// A digit run of at least 8 characters allowing common separators, e.g.
// 08003339999, 800-555-1234, +44 7700 900123, 0700-555-6578.
inline constexpr const char* kDefaultPhonePattern = R"(\+?\(?\d[\d\-. ()]{6,}\d)";

struct ValidationRules {
  std::size_t min_chars = 10;
  std::size_t max_chars = 500;
  std::vector<std::string> placeholder_patterns = default_placeholder_patterns();
  bool smishing_requires_artifact = true;
  std::string url_pattern = kDefaultUrlPattern;
  std::string phone_pattern = kDefaultPhonePattern;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["min_chars"] = min_chars;
    j["max_chars"] = max_chars;
    j["placeholder_patterns"] = placeholder_patterns;
    j["smishing_requires_artifact"] = smishing_requires_artifact;
    j["url_pattern"] = url_pattern;
    j["phone_pattern"] = phone_pattern;
    return j;
  }

  static ValidationRules from_json(const nlohmann::json& j) {
    ValidationRules r;
    r.min_chars = j.value("min_chars", r.min_chars);
    r.max_chars = j.value("max_chars", r.max_chars);
    r.placeholder_patterns = j.value("placeholder_patterns", r.placeholder_patterns);
    r.smishing_requires_artifact = j.value("smishing_requires_artifact", r.smishing_requires_artifact);
    r.url_pattern = j.value("url_pattern", r.url_pattern);
    r.phone_pattern = j.value("phone_pattern", r.phone_pattern);
    return r;
  }

  std::string hash() const { return content_hash(to_json().dump()); }
};

// Rules with their regexes compiled once; shareable across threads for matching.
class Validator {
 public:
  explicit Validator(ValidationRules rules = {}) : rules_(std::move(rules)) {
    std::vector<std::string> problems;
    if (rules_.min_chars >= rules_.max_chars) problems.push_back("validation.min_chars must be < max_chars");
    auto compile = [&](const std::string& pattern, const char* what) {
      try {
        return std::regex(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
      } catch (const std::regex_error& e) {
        problems.push_back(std::string("validation.") + what + " does not compile: " + pattern);
        return std::regex();
      }
    };
    for (const auto& p : rules_.placeholder_patterns) placeholders_.push_back(compile(p, "placeholder_patterns"));
    url_ = compile(rules_.url_pattern, "url_pattern");
    phone_ = compile(rules_.phone_pattern, "phone_pattern");
    if (!problems.empty()) throw ConfigError(problems);
  }

  const ValidationRules& rules() const { return rules_; }

  bool has_url(std::string_view s) const { return std::regex_search(s.begin(), s.end(), url_); }
  bool has_phone(std::string_view s) const { return std::regex_search(s.begin(), s.end(), phone_); }
  const std::regex& url_regex() const { return url_; }
  const std::regex& phone_regex() const { return phone_; }

  bool has_placeholder(std::string_view s) const {
    for (const auto& re : placeholders_) {
      if (std::regex_search(s.begin(), s.end(), re)) return true;
    }
    return false;
  }

  // Rules are checked in order: Empty, length, Placeholder, NoActionableArtifact.
  ValidationVerdict validate(std::string_view candidate, Label label) const {
    const auto t = text::trim(candidate);
    if (t.empty()) return ValidationVerdict::reject(RejectReason::Empty);
    const auto len = text::utf8_length(t);
    if (len < rules_.min_chars) return ValidationVerdict::reject(RejectReason::TooShort);
    if (len > rules_.max_chars) return ValidationVerdict::reject(RejectReason::TooLong);
    if (has_placeholder(t)) return ValidationVerdict::reject(RejectReason::Placeholder);
    if (label == Label::Smishing && rules_.smishing_requires_artifact && !has_url(t) && !has_phone(t)) {
      return ValidationVerdict::reject(RejectReason::NoActionableArtifact);
    }
    return ValidationVerdict::ok();
  }

 private:
  ValidationRules rules_;
  std::vector<std::regex> placeholders_;
  std::regex url_;
  std::regex phone_;
};

inline ValidationVerdict validate_candidate(std::string_view text, Label label, const ValidationRules& rules) {
  return Validator(rules).validate(text, label);
}

// Incremental dedup over normalized text. Not thread-safe; callers merge in a
// fixed order when working in parallel.
class Deduper {
 public:
  Deduper() = default;

  template <class Range>
  explicit Deduper(const Range& existing) {
    for (const auto& s : existing) seen_.insert(text::normalize(s));
  }

  bool seen(std::string_view s) const { return seen_.count(text::normalize(s)) > 0; }

  // True when `s` is new; it is then remembered.
  bool insert(std::string_view s) { return seen_.insert(text::normalize(s)).second; }

  std::size_t size() const { return seen_.size(); }

 private:
  std::unordered_set<std::string> seen_;
};

inline std::vector<std::string> dedup(const std::vector<std::string>& candidates,
                                      const std::vector<std::string>& existing) {
  Deduper d(existing);
  std::vector<std::string> out;
  for (const auto& c : candidates) {
    if (d.insert(c)) out.push_back(c);
  }
  return out;
}

struct RejectionRecord {
  std::string text_hash;
  RejectReason reason = RejectReason::Empty;
  std::string prompt_id;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["text_hash"] = text_hash;
    j["reason"] = reason_name(reason);
    if (!prompt_id.empty()) j["prompt_id"] = prompt_id;
    return j;
  }
};

}  // namespace smishaug
