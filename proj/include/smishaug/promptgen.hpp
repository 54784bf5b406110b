#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smishaug/corpus.hpp"
#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/principle.hpp"
#include "smishaug/text.hpp"

namespace smishaug {

// Wording for every prompt section. Placeholders: {m} in roles and the output
// instruction; {code}, {name}, {definition} in persuasion blocks; {i} and
// {demo_i} in the demo template.
struct PromptTemplateSet {
  std::string role_smishing;
  std::string role_spam;
  std::array<std::string, kPrincipleCount> persuasion_block;
  std::string demo = "Example {i}: {demo_i}";
  std::string separator = "\n\n";
  std::string output_instruction;

  void validate() const {
    std::vector<std::string> problems;
    auto need = [&](const std::string& v, const std::string& key) {
      if (v.empty()) problems.push_back("template section '" + key + "' is empty");
    };
    need(role_smishing, "role_smishing");
    need(role_spam, "role_spam");
    for (auto p : kAllPrinciples) {
      need(persuasion_block[principle_index(p)], "p" + std::string(principle_code(p).substr(1)));
    }
    need(demo, "demo");
    need(separator, "separator");
    need(output_instruction, "output_instruction");
    if (!problems.empty()) throw ConfigError(problems);
  }

  std::string serialize() const;
  std::string hash() const { return content_hash(serialize()); }

  static PromptTemplateSet parse(std::string_view source, const std::string& origin = "<templates>");
  static PromptTemplateSet load(const std::filesystem::path& path);
  static const PromptTemplateSet& defaults();
};

namespace detail {

inline std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char n = s[i + 1];
      if (n == 'n') { out += '\n'; ++i; continue; }
      if (n == 't') { out += '\t'; ++i; continue; }
      if (n == '\\') { out += '\\'; ++i; continue; }
    }
    out += s[i];
  }
  return out;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else out += c;
  }
  return out;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

inline const std::array<std::string, kPrincipleCount>& principle_keys() {
  static const std::array<std::string, kPrincipleCount> k = {"p1", "p2", "p3", "p4", "p5"};
  return k;
}

}  // namespace detail

// Section file format: a line "[key]" opens a section whose body is every
// following line up to the next header. Blank lines around a body are dropped,
// "#" lines outside bodies are comments, and \n, \t, \\ escapes are expanded.
inline PromptTemplateSet PromptTemplateSet::parse(std::string_view source, const std::string& origin) {
  std::map<std::string, std::vector<std::string>> sections;
  std::string current;
  std::istringstream in{std::string(source)};
  std::string line;
  std::size_t n = 0;
  static const std::regex header(R"(^\[([a-z0-9_]+)\]\s*$)");
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, header)) {
      current = m[1];
      if (sections.count(current)) {
        throw Error(ErrorKind::Parse, origin + " line " + std::to_string(n) + ": duplicate section [" + current + "]");
      }
      sections[current];
      continue;
    }
    if (current.empty()) {
      if (text::trim(line).empty() || line.front() == '#') continue;
      throw Error(ErrorKind::Parse, origin + " line " + std::to_string(n) + ": text outside any section");
    }
    sections[current].push_back(line);
  }

  auto body = [&](const std::string& key) -> std::optional<std::string> {
    auto it = sections.find(key);
    if (it == sections.end()) return std::nullopt;
    auto lines = it->second;
    while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
    std::size_t first = 0;
    while (first < lines.size() && text::trim(lines[first]).empty()) ++first;
    std::string joined;
    for (std::size_t i = first; i < lines.size(); ++i) {
      if (i > first) joined += '\n';
      joined += lines[i];
    }
    return detail::unescape(joined);
  };

  std::vector<std::string> problems;
  auto required = [&](const std::string& key) {
    auto v = body(key);
    if (!v) problems.push_back(origin + ": missing section [" + key + "]");
    return v.value_or("");
  };
  PromptTemplateSet t;
  t.role_smishing = required("role_smishing");
  t.role_spam = required("role_spam");
  for (auto p : kAllPrinciples) {
    t.persuasion_block[principle_index(p)] = required(detail::principle_keys()[principle_index(p)]);
  }
  t.separator = required("separator");
  t.output_instruction = required("output_instruction");
  if (auto d = body("demo")) t.demo = *d;
  for (const auto& [key, _] : sections) {
    static const std::vector<std::string> known = {"role_smishing", "role_spam", "p1", "p2", "p3", "p4",
                                                   "p5", "separator", "output_instruction", "demo"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      problems.push_back(origin + ": unknown section [" + key + "]");
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  t.validate();
  return t;
}

inline std::string PromptTemplateSet::serialize() const {
  std::string out;
  auto section = [&](const std::string& key, const std::string& value, bool escape_all) {
    out += "[" + key + "]\n";
    out += escape_all ? detail::escape(value) : detail::replace_all(value, "\\", "\\\\");
    out += "\n\n";
  };
  section("role_smishing", role_smishing, false);
  section("role_spam", role_spam, false);
  for (auto p : kAllPrinciples) {
    section(detail::principle_keys()[principle_index(p)], persuasion_block[principle_index(p)], false);
  }
  section("demo", demo, false);
  section("separator", separator, true);
  section("output_instruction", output_instruction, false);
  return out;
}

inline PromptTemplateSet PromptTemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open template file " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(data, path.string());
}

inline constexpr std::string_view kDefaultTemplateSource = R"([role_smishing]
You are a smishing message generator helping to build a training dataset for an SMS phishing detector. Write realistic smishing (SMS phishing) messages that try to obtain personal or financial information. Each message must read like a genuine SMS and must contain a plausible contact number or web link.

[role_spam]
You are a spam message generator helping to build a training dataset for an SMS spam filter. Write realistic unsolicited promotional SMS messages (spam) that advertise products, services, or offers.

[p1]
Persuasion principle {code} ({name}): {definition}
Every message you write must apply this principle.

[p2]
Persuasion principle {code} ({name}): {definition}
Every message you write must apply this principle.

[p3]
Persuasion principle {code} ({name}): {definition}
Every message you write must apply this principle.

[p4]
Persuasion principle {code} ({name}): {definition}
Every message you write must apply this principle.

[p5]
Persuasion principle {code} ({name}): {definition}
Every message you write must apply this principle.

[demo]
Example {i}: {demo_i}

[separator]
\n\n

[output_instruction]
Write {m} new messages in the same style as the examples. Return them as a numbered list (1. to {m}.), one message per item, with no commentary. Use concrete details instead of placeholders or brackets.
)";

inline const PromptTemplateSet& PromptTemplateSet::defaults() {
  static const PromptTemplateSet t = parse(kDefaultTemplateSource, "<default templates>");
  return t;
}

// ---------------------------------------------------------------------------
// Demonstration sampling and prompt assembly
// ---------------------------------------------------------------------------

struct DemoSample {
  std::vector<Message> demos;
  bool with_replacement = false;  // pool was smaller than n
};

// Draws n demos uniformly without replacement from the pool (restricted to
// `principle` when given). Pools smaller than n are sampled with replacement.
inline DemoSample sample_demos(const std::vector<Message>& pool, std::optional<Principle> principle,
                               std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorKind::Invalid, "demo count must be positive");
  std::vector<const Message*> eligible;
  for (const auto& m : pool) {
    if (!principle || m.principle == principle) eligible.push_back(&m);
  }
  if (eligible.empty()) {
    throw Error(ErrorKind::Invalid,
                principle ? "empty demo pool for principle " + std::string(principle_code(*principle))
                          : std::string("empty demo pool"));
  }
  DemoSample out;
  if (eligible.size() < n) {
    out.with_replacement = true;
    for (std::size_t i = 0; i < n; ++i) out.demos.push_back(*eligible[rng.below(eligible.size())]);
    return out;
  }
  // Partial Fisher-Yates: the first n slots end up a uniform sample in random order.
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + rng.below(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
    out.demos.push_back(*eligible[i]);
  }
  return out;
}

struct PromptBundle {
  Label label = Label::Smishing;
  std::optional<Principle> principle;
  std::string role_text;
  std::optional<std::string> persuasion_text;
  std::vector<Message> demos;
  std::size_t m = 10;
  std::string rendered;
  std::string prompt_id;
  bool with_replacement = false;
};

inline std::string make_prompt_id(std::string_view rendered) { return "p" + content_hash(rendered); }

inline std::string render_persuasion_block(const PromptTemplateSet& templates, Principle p) {
  auto s = templates.persuasion_block[principle_index(p)];
  s = detail::replace_all(std::move(s), "{code}", principle_code(p));
  s = detail::replace_all(std::move(s), "{name}", principle_name(p));
  return detail::replace_all(std::move(s), "{definition}", principle_definition(p));
}

// Renders role, [persuasion block], demo_1..demo_n, output instruction joined by
// the separator. principle == nullopt omits the persuasion section entirely.
inline PromptBundle build_prompt(Label label, std::optional<Principle> principle,
                                 const std::vector<Message>& demos, std::size_t m,
                                 const PromptTemplateSet& templates) {
  if (label == Label::Ham) throw Error(ErrorKind::Invalid, "prompts are built for smishing or spam only");
  if (demos.empty()) throw Error(ErrorKind::Invalid, "a prompt needs at least one demonstration");
  if (m == 0) throw Error(ErrorKind::Invalid, "requested sample count must be positive");
  for (const auto& d : demos) {
    if (d.label != label) {
      throw Error(ErrorKind::Invalid, "demo '" + d.id + "' is labelled " + std::string(label_name(d.label)) +
                                          ", expected " + std::string(label_name(label)));
    }
    if (principle && d.principle != principle) {
      throw Error(ErrorKind::Invalid, "demo '" + d.id + "' does not carry principle " +
                                          std::string(principle_code(*principle)));
    }
  }

  PromptBundle b;
  b.label = label;
  b.principle = principle;
  b.demos = demos;
  b.m = m;
  const auto m_str = std::to_string(m);
  b.role_text = detail::replace_all(label == Label::Smishing ? templates.role_smishing : templates.role_spam,
                                    "{m}", m_str);
  std::vector<std::string> sections{b.role_text};
  if (principle) {
    b.persuasion_text = render_persuasion_block(templates, *principle);
    sections.push_back(*b.persuasion_text);
  }
  for (std::size_t i = 0; i < demos.size(); ++i) {
    auto d = detail::replace_all(templates.demo, "{i}", std::to_string(i + 1));
    sections.push_back(detail::replace_all(std::move(d), "{demo_i}", text::trim(demos[i].text)));
  }
  sections.push_back(detail::replace_all(templates.output_instruction, "{m}", m_str));
  b.rendered = text::join(sections, templates.separator);
  b.prompt_id = make_prompt_id(b.rendered);
  return b;
}

// ---------------------------------------------------------------------------
// Output parsing
// ---------------------------------------------------------------------------

struct GenerationBatch {
  std::string prompt_id;
  std::string raw_response;
  std::vector<std::string> candidates;
};

namespace detail {

inline std::string strip_quotes(std::string_view s) {
  s = text::trim(s);
  static const std::array<std::pair<std::string_view, std::string_view>, 4> pairs = {{
      {"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}}};
  for (const auto& [open, close] : pairs) {
    if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
        s.substr(s.size() - close.size()) == close) {
      return std::string(text::trim(s.substr(open.size(), s.size() - open.size() - close.size())));
    }
  }
  return std::string(s);
}

}  // namespace detail

// Recognizes model refusals such as "I'm just an AI, I cannot generate ...".
inline bool looks_like_refusal(std::string_view raw) {
  auto s = detail::replace_all(text::to_lower(raw), "\xE2\x80\x99", "'");
  static const std::array<std::string_view, 12> markers = {
      "i'm just an ai", "i am just an ai", "as an ai", "i cannot", "i can't", "i can not",
      "i'm sorry", "i am sorry", "i'm unable", "i am unable", "i won't", "i will not"};
  for (auto m : markers) {
    if (s.find(m) != std::string::npos) return true;
  }
  return false;
}

// Primary parse: numbered items "<k>." or "<k>)"; a numbered line absorbs the
// non-blank lines that follow it. Fallback when nothing is numbered:
// blank-line-separated blocks, skipping refusals. Returns at most m items.
inline std::vector<std::string> parse_generation(std::string_view raw, std::size_t m) {
  static const std::regex numbered(R"(^\s*\d{1,3}[.)](?:\s+(.*)|\s*)$)");
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(raw)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  std::vector<std::string> items;
  bool any_numbered = false;
  std::optional<std::string> current;
  auto flush = [&] {
    if (current) {
      auto s = detail::strip_quotes(*current);
      if (!s.empty()) items.push_back(std::move(s));
      current.reset();
    }
  };
  for (const auto& line : lines) {
    std::smatch match;
    if (std::regex_match(line, match, numbered)) {
      any_numbered = true;
      flush();
      current = std::string(text::trim(match[1].str()));
    } else if (text::trim(line).empty()) {
      flush();
    } else if (current) {
      *current += ' ';
      *current += text::trim(line);
    }
  }
  flush();

  if (!any_numbered) {
    std::string block;
    auto end_block = [&] {
      auto s = detail::strip_quotes(block);
      if (!s.empty() && !looks_like_refusal(s)) items.push_back(std::move(s));
      block.clear();
    };
    for (const auto& line : lines) {
      if (text::trim(line).empty()) {
        end_block();
      } else {
        if (!block.empty()) block += ' ';
        block += text::trim(line);
      }
    }
    end_block();
  }
  if (items.size() > m) items.resize(m);
  return items;
}

}  // namespace smishaug
