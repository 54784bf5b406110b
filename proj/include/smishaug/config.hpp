#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "smishaug/corpus.hpp"
#include "smishaug/error.hpp"
#include "smishaug/evalkit.hpp"
#include "smishaug/llm_gateway.hpp"
#include "smishaug/pipeline.hpp"
#include "smishaug/text.hpp"
#include "smishaug/validator.hpp"

namespace smishaug {

// INI run configuration. Values may reference environment variables as
// ${NAME} or ${NAME:-fallback}; relative paths resolve against the config
// file's directory.
struct RunConfig {
  std::filesystem::path source;

  std::filesystem::path corpus_path;
  std::optional<CorpusFormat> corpus_format;
  bool drop_ham = true;

  std::size_t k = 5;
  std::uint64_t seed = 13;

  std::filesystem::path annotations_path;
  std::filesystem::path overrides_path;
  int vote_threshold = 3;

  std::filesystem::path templates_path;  // empty: built-in templates
  ValidationRules rules;

  GatewayConfig gateway;
  std::string model = "gpt-4o";
  double temperature = kDefaultTemperature;
  std::optional<int> max_tokens;
  std::optional<std::string> system_prompt;
  Transport transport = Transport::Replay;
  std::filesystem::path fixture_path;
  std::size_t workers = 1;

  std::vector<Method> methods;
  std::vector<int> factors{2, 5, 10};
  std::set<int> allowed_factors{2, 5, 10};
  double alpha = 0.1;
  std::filesystem::path lexicon_path;    // empty: built-in lexicon
  std::filesystem::path stopwords_path;  // empty: built-in list
  std::size_t demos_per_prompt = 5;
  std::size_t samples_per_prompt = 10;
  int attempt_cap_multiplier = 20;
  bool theory_on_spam = false;

  std::vector<evalkit::ModelConfig> models = evalkit::default_model_configs();
  int epochs = 300;

  std::filesystem::path output_root = "runs";
};

namespace config_detail {

inline std::string interpolate(const std::string& value, std::vector<std::string>& errors, const std::string& where) {
  static const std::regex var(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)(:-([^}]*))?\})");
  std::string out;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(value.begin(), value.end(), var); it != std::sregex_iterator(); ++it) {
    out.append(value, last, static_cast<std::size_t>(it->position()) - last);
    const auto name = (*it)[1].str();
    if (const char* env = std::getenv(name.c_str())) {
      out += env;
    } else if ((*it)[2].matched) {
      out += (*it)[3].str();
    } else {
      errors.push_back(where + ": environment variable " + name + " is not set");
    }
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  out.append(value, last, std::string::npos);
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  try {
    std::size_t pos = 0;
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(s, &pos));
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!s.empty() && s[0] == '-') return false;
      out = static_cast<T>(std::stoull(s, &pos));
    } else {
      out = static_cast<T>(std::stoll(s, &pos));
    }
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

inline bool parse_bool(const std::string& s, bool& out) {
  const auto v = text::to_lower(s);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return out = true, true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return out = false, true;
  return false;
}

inline std::vector<std::string> list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : text::split(s, ',')) {
    auto t = std::string(text::trim(part));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace config_detail

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"corpus", {"path", "format", "drop_ham"}},
      {"folds", {"k", "seed"}},
      {"annotation", {"path", "overrides", "threshold"}},
      {"templates", {"path"}},
      {"validation",
       {"min_chars", "max_chars", "smishing_requires_artifact", "url_pattern", "phone_pattern",
        "placeholder_patterns"}},
      {"gateway",
       {"endpoint", "api_key", "model", "temperature", "max_tokens", "system_prompt", "max_inflight",
        "max_retries", "backoff_base_ms", "backoff_cap_ms", "requests_per_second", "transport", "fixture",
        "workers"}},
      {"augment",
       {"methods", "factors", "allowed_factors", "alpha", "lexicon", "stopwords", "demos_per_prompt",
        "samples_per_prompt", "attempt_cap_multiplier", "theory_on_spam"}},
      {"eval", {"models", "epochs"}},
      {"output", {"root"}},
  };
  return schema;
}

// Parses and validates; every problem found is reported in one ConfigError.
inline RunConfig parse_run_config(std::istream& in, const std::filesystem::path& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({origin.string() + ":" + std::to_string(e.line()) + ": " + e.message()});
  }

  RunConfig c;
  c.source = origin;
  std::vector<std::string> errors;
  const auto base = origin.has_parent_path() ? origin.parent_path() : std::filesystem::path(".");
  const auto& schema = config_schema();

  std::map<std::string, std::string> values;
  for (const auto& [section, body] : tree) {
    auto sit = schema.find(section);
    if (!body.data().empty() || sit == schema.end()) {
      errors.push_back(sit == schema.end() ? "unknown section [" + section + "]"
                                           : "key '" + section + "' outside any section");
      continue;
    }
    for (const auto& [key, node] : body) {
      const auto full = section + "." + key;
      if (!sit->second.count(key)) {
        errors.push_back("unknown key " + full);
        continue;
      }
      values[full] = config_detail::interpolate(node.data(), errors, full);
    }
  }

  auto get = [&](const std::string& key) -> const std::string* {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  auto path_of = [&](const std::string& key, std::filesystem::path& out) {
    if (const auto* v = get(key)) {
      if (v->empty()) return;
      std::filesystem::path p(*v);
      out = p.is_absolute() ? p : base / p;
    }
  };
  auto num = [&](const std::string& key, auto& out) {
    if (const auto* v = get(key)) {
      if (!config_detail::parse_number(*v, out)) errors.push_back(key + ": not a valid number: '" + *v + "'");
    }
  };
  auto flag = [&](const std::string& key, bool& out) {
    if (const auto* v = get(key)) {
      if (!config_detail::parse_bool(*v, out)) errors.push_back(key + ": expected true or false, got '" + *v + "'");
    }
  };

  path_of("corpus.path", c.corpus_path);
  if (const auto* v = get("corpus.format")) {
    const auto f = text::to_lower(*v);
    if (f == "csv") c.corpus_format = CorpusFormat::Csv;
    else if (f == "jsonl") c.corpus_format = CorpusFormat::Jsonl;
    else if (f != "auto" && !f.empty()) errors.push_back("corpus.format: expected csv, jsonl or auto");
  }
  flag("corpus.drop_ham", c.drop_ham);
  num("folds.k", c.k);
  num("folds.seed", c.seed);
  path_of("annotation.path", c.annotations_path);
  path_of("annotation.overrides", c.overrides_path);
  num("annotation.threshold", c.vote_threshold);
  path_of("templates.path", c.templates_path);

  num("validation.min_chars", c.rules.min_chars);
  num("validation.max_chars", c.rules.max_chars);
  flag("validation.smishing_requires_artifact", c.rules.smishing_requires_artifact);
  if (const auto* v = get("validation.url_pattern")) c.rules.url_pattern = *v;
  if (const auto* v = get("validation.phone_pattern")) c.rules.phone_pattern = *v;
  if (const auto* v = get("validation.placeholder_patterns")) {
    // Several patterns are separated by whitespace-surrounded "||".
    c.rules.placeholder_patterns.clear();
    std::size_t start = 0;
    for (;;) {
      auto pos = v->find(" || ", start);
      auto part = std::string(text::trim(std::string_view(*v).substr(start, pos == std::string::npos ? pos : pos - start)));
      if (!part.empty()) c.rules.placeholder_patterns.push_back(part);
      if (pos == std::string::npos) break;
      start = pos + 4;
    }
  }

  if (const auto* v = get("gateway.endpoint")) c.gateway.endpoint_url = *v;
  if (const auto* v = get("gateway.api_key")) c.gateway.api_key = *v;
  if (const auto* v = get("gateway.model")) c.model = *v;
  num("gateway.temperature", c.temperature);
  if (const auto* v = get("gateway.max_tokens"); v && !v->empty()) {
    int t = 0;
    if (config_detail::parse_number(*v, t) && t > 0) c.max_tokens = t;
    else errors.push_back("gateway.max_tokens: expected a positive integer");
  }
  if (const auto* v = get("gateway.system_prompt"); v && !v->empty()) c.system_prompt = *v;
  num("gateway.max_inflight", c.gateway.max_inflight);
  num("gateway.max_retries", c.gateway.max_retries);
  {
    long long ms = c.gateway.backoff_base.count();
    num("gateway.backoff_base_ms", ms);
    c.gateway.backoff_base = std::chrono::milliseconds(ms);
    ms = c.gateway.backoff_cap.count();
    num("gateway.backoff_cap_ms", ms);
    c.gateway.backoff_cap = std::chrono::milliseconds(ms);
  }
  num("gateway.requests_per_second", c.gateway.requests_per_second);
  if (const auto* v = get("gateway.transport")) {
    if (auto t = parse_transport(*v)) c.transport = *t;
    else errors.push_back("gateway.transport: expected live, record or replay");
  }
  path_of("gateway.fixture", c.fixture_path);
  num("gateway.workers", c.workers);

  if (const auto* v = get("augment.methods")) {
    for (const auto& name : config_detail::list(*v)) {
      if (auto m = parse_method(name)) c.methods.push_back(*m);
      else errors.push_back("augment.methods: unknown method '" + name + "'");
    }
  }
  auto int_list = [&](const std::string& key, auto&& sink) {
    if (const auto* v = get(key)) {
      for (const auto& s : config_detail::list(*v)) {
        int f = 0;
        if (config_detail::parse_number(s, f)) sink(f);
        else errors.push_back(key + ": not an integer: '" + s + "'");
      }
    }
  };
  if (get("augment.allowed_factors")) {
    c.allowed_factors.clear();
    int_list("augment.allowed_factors", [&](int f) { c.allowed_factors.insert(f); });
  }
  if (get("augment.factors")) {
    c.factors.clear();
    int_list("augment.factors", [&](int f) { c.factors.push_back(f); });
  }
  num("augment.alpha", c.alpha);
  path_of("augment.lexicon", c.lexicon_path);
  path_of("augment.stopwords", c.stopwords_path);
  num("augment.demos_per_prompt", c.demos_per_prompt);
  num("augment.samples_per_prompt", c.samples_per_prompt);
  num("augment.attempt_cap_multiplier", c.attempt_cap_multiplier);
  flag("augment.theory_on_spam", c.theory_on_spam);

  if (const auto* v = get("eval.models")) {
    c.models.clear();
    for (const auto& name : config_detail::list(*v)) {
      if (auto m = evalkit::model_config_by_name(name)) c.models.push_back(*m);
      else errors.push_back("eval.models: unknown model config '" + name + "'");
    }
  }
  num("eval.epochs", c.epochs);
  path_of("output.root", c.output_root);

  // Range checks.
  if (c.k < 2) errors.push_back("folds.k: must be at least 2");
  if (c.vote_threshold < 1) errors.push_back("annotation.threshold: must be positive");
  if (c.rules.min_chars >= c.rules.max_chars) errors.push_back("validation: min_chars must be below max_chars");
  if (!(c.temperature >= 0.0 && c.temperature <= 2.0)) errors.push_back("gateway.temperature: must lie in [0, 2]");
  if (c.gateway.max_inflight == 0) errors.push_back("gateway.max_inflight: must be positive");
  if (c.gateway.max_retries < 0) errors.push_back("gateway.max_retries: must not be negative");
  if (c.gateway.backoff_base.count() < 0 || c.gateway.backoff_cap < c.gateway.backoff_base) {
    errors.push_back("gateway.backoff_cap_ms: must be at least backoff_base_ms");
  }
  if (c.gateway.requests_per_second < 0) errors.push_back("gateway.requests_per_second: must not be negative");
  if (c.workers == 0) errors.push_back("gateway.workers: must be positive");
  if (c.transport == Transport::Replay && c.fixture_path.empty() && !c.methods.empty()) {
    for (auto m : c.methods) {
      if (!is_eda_method(m)) {
        errors.push_back("gateway.fixture: replay transport needs a fixture path");
        break;
      }
    }
  }
  if (c.transport != Transport::Replay) {
    for (auto m : c.methods) {
      if (!is_eda_method(m) && c.gateway.endpoint_url.empty()) {
        errors.push_back("gateway.endpoint: live and record transports need an endpoint");
        break;
      }
    }
  }
  for (int f : c.factors) {
    if (!c.allowed_factors.count(f)) {
      errors.push_back("augment.factors: " + std::to_string(f) + " is not among allowed_factors");
    }
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) errors.push_back("augment.alpha: must lie in (0, 1]");
  if (c.demos_per_prompt == 0) errors.push_back("augment.demos_per_prompt: must be positive");
  if (c.samples_per_prompt == 0) errors.push_back("augment.samples_per_prompt: must be positive");
  if (c.attempt_cap_multiplier < 1) errors.push_back("augment.attempt_cap_multiplier: must be positive");
  if (c.epochs < 1) errors.push_back("eval.epochs: must be positive");
  if (c.models.empty()) errors.push_back("eval.models: at least one model config is required");
  try {
    Validator probe(c.rules);
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) errors.push_back("validation: " + v);
  }

  // Referenced paths must exist at launch.
  const std::vector<std::pair<const char*, const std::filesystem::path*>> paths = {
      {"corpus.path", &c.corpus_path},         {"annotation.path", &c.annotations_path},
      {"annotation.overrides", &c.overrides_path}, {"templates.path", &c.templates_path},
      {"augment.lexicon", &c.lexicon_path},    {"augment.stopwords", &c.stopwords_path},
  };
  for (const auto& [key, p] : paths) {
    if (!p->empty() && !std::filesystem::exists(*p)) errors.push_back(std::string(key) + ": " + p->string() + " does not exist");
  }
  if (c.transport == Transport::Replay && !c.fixture_path.empty() && !std::filesystem::exists(c.fixture_path)) {
    errors.push_back("gateway.fixture: " + c.fixture_path.string() + " does not exist");
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  return parse_run_config(in, path);
}

}  // namespace smishaug
