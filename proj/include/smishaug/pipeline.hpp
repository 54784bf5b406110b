#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <compare>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "smishaug/corpus.hpp"
#include "smishaug/eda.hpp"
#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/llm_gateway.hpp"
#include "smishaug/promptgen.hpp"
#include "smishaug/validator.hpp"

namespace smishaug {

enum class Method : std::uint8_t { EdaSR, EdaRI, EdaRS, EdaRD, LlmTheory, LlmPlain };

inline constexpr std::array<Method, 6> kAllMethods = {Method::EdaSR, Method::EdaRI,    Method::EdaRS,
                                                      Method::EdaRD, Method::LlmPlain, Method::LlmTheory};

inline Source method_source(Method m) {
  switch (m) {
    case Method::EdaSR: return Source::EdaSR;
    case Method::EdaRI: return Source::EdaRI;
    case Method::EdaRS: return Source::EdaRS;
    case Method::EdaRD: return Source::EdaRD;
    case Method::LlmTheory: return Source::LlmTheory;
    case Method::LlmPlain: return Source::LlmPlain;
  }
  return Source::Original;
}

inline std::string_view method_name(Method m) { return source_name(method_source(m)); }

inline std::optional<Method> parse_method(std::string_view s) {
  for (auto m : kAllMethods) {
    if (text::iequals(text::trim(s), method_name(m))) return m;
  }
  return std::nullopt;
}

inline bool is_eda_method(Method m) { return is_eda(method_source(m)); }

inline eda::Technique method_technique(Method m) {
  switch (m) {
    case Method::EdaRI: return eda::Technique::RI;
    case Method::EdaRS: return eda::Technique::RS;
    case Method::EdaRD: return eda::Technique::RD;
    default: return eda::Technique::SR;
  }
}

struct BucketKey {
  Label label = Label::Smishing;
  std::optional<Principle> principle;

  friend auto operator<=>(const BucketKey&, const BucketKey&) = default;
  friend bool operator==(const BucketKey&, const BucketKey&) = default;
};

inline std::string bucket_name(const BucketKey& k) {
  std::string s(label_name(k.label));
  if (k.principle) s += "/" + std::string(principle_code(*k.principle));
  return s;
}

using Quotas = std::map<BucketKey, std::size_t>;

inline std::size_t quota_total(const Quotas& q) {
  std::size_t t = 0;
  for (const auto& [_, v] : q) t += v;
  return t;
}

// Largest-remainder apportionment of `total` by `weights`; ties go to the
// earlier weight. The result always sums to `total`.
inline std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& weights) {
  std::size_t wsum = 0;
  for (auto w : weights) wsum += w;
  if (wsum == 0) throw Error(ErrorKind::Invalid, "cannot apportion over zero total weight");
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder numerator, index)
  std::size_t given = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto num = static_cast<unsigned __int128>(total) * weights[i];
    out[i] = static_cast<std::size_t>(num / wsum);
    remainders.emplace_back(static_cast<std::size_t>(num % wsum), i);
    given += out[i];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; given < total; ++k, ++given) out[remainders[k].second] += 1;
  return out;
}

// Splits the (factor - 1) * |train| budget across labels by label counts and,
// for theory-grounded smishing, across principles by the annotated distribution.
inline Quotas plan_quotas(const Corpus& train, int factor, Method method, bool theory_on_spam = false) {
  if (factor < 2) throw Error(ErrorKind::Invalid, "augmentation factor must be at least 2");
  if (train.empty()) throw Error(ErrorKind::Invalid, "empty training slice");
  const std::size_t budget = static_cast<std::size_t>(factor - 1) * train.size();
  const std::vector<Label> labels{Label::Smishing, Label::Spam};
  if (train.count(Label::Ham) > 0) throw Error(ErrorKind::Invalid, "training slice contains ham messages");

  std::vector<std::size_t> counts;
  for (auto l : labels) counts.push_back(train.count(l));
  const auto per_label = apportion(budget, counts);

  Quotas quotas;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (counts[i] == 0) continue;
    const Label label = labels[i];
    const bool by_principle =
        method == Method::LlmTheory && (label == Label::Smishing || theory_on_spam);
    if (!by_principle) {
      quotas[{label, std::nullopt}] = per_label[i];
      continue;
    }
    std::vector<std::size_t> annotated(kPrincipleCount, 0);
    for (const auto& m : train.messages) {
      if (m.label == label && m.principle) annotated[principle_index(*m.principle)] += 1;
    }
    std::size_t total_annotated = 0;
    for (auto a : annotated) total_annotated += a;
    if (total_annotated == 0) {
      throw Error(ErrorKind::Invalid, "theory-grounded augmentation needs annotated " +
                                          std::string(label_name(label)) + " messages in the training slice");
    }
    const auto split = apportion(per_label[i], annotated);
    for (auto p : kAllPrinciples) {
      if (annotated[principle_index(p)] > 0) quotas[{label, p}] = split[principle_index(p)];
    }
  }
  return quotas;
}

struct AugmentationPlan {
  Method method = Method::EdaSR;
  int factor = 2;
  FoldPlan fold;
  std::uint64_t run_seed = 0;
  Quotas quotas;
  int attempt_cap_multiplier = 20;
  std::size_t demos_per_prompt = 5;
  std::size_t samples_per_prompt = 10;
  bool theory_on_spam = false;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method_name(method);
    j["factor"] = factor;
    j["fold"] = fold.repeat_index;
    j["run_seed"] = run_seed;
    j["attempt_cap_multiplier"] = attempt_cap_multiplier;
    j["demos_per_prompt"] = demos_per_prompt;
    j["samples_per_prompt"] = samples_per_prompt;
    j["theory_on_spam"] = theory_on_spam;
    auto q = nlohmann::ordered_json::array();
    for (const auto& [k, v] : quotas) {
      q.push_back({{"label", label_name(k.label)},
                    {"principle", k.principle ? nlohmann::ordered_json(principle_code(*k.principle))
                                              : nlohmann::ordered_json(nullptr)},
                    {"quota", v}});
    }
    j["quotas"] = std::move(q);
    return j;
  }
};

inline AugmentationPlan make_plan(const Corpus& train, Method method, int factor, FoldPlan fold,
                                  std::uint64_t run_seed, bool theory_on_spam = false) {
  AugmentationPlan plan;
  plan.method = method;
  plan.factor = factor;
  plan.fold = std::move(fold);
  plan.run_seed = run_seed;
  plan.theory_on_spam = theory_on_spam;
  plan.quotas = plan_quotas(train, factor, method, theory_on_spam);
  return plan;
}

enum class RunStatus { Ok, AttemptCap, GatewayFailure, Interrupted };

inline std::string_view status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::AttemptCap: return "attempt_cap";
    case RunStatus::GatewayFailure: return "gateway_failure";
    case RunStatus::Interrupted: return "interrupted";
  }
  return "?";
}

struct BucketReport {
  BucketKey key;
  std::size_t quota = 0;
  std::size_t accepted = 0;
  std::size_t requests = 0;
  RunStatus status = RunStatus::Ok;
  std::string error;
};

struct RunManifest {
  AugmentationPlan plan;
  std::string template_hash;
  std::string rules_hash;
  std::string model;
  std::string transport;
  std::string fixture;
  std::size_t train_size = 0;
  std::size_t accepted = 0;
  std::map<RejectReason, std::size_t> rejected;
  std::vector<BucketReport> buckets;
  std::size_t eda_duplicates_kept = 0;
  double wall_clock_seconds = 0.0;
  RunStatus status = RunStatus::Ok;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();  // caller-provided, for re-runs

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["plan"] = plan.to_json();
    j["status"] = status_name(status);
    j["train_size"] = train_size;
    j["accepted"] = accepted;
    j["expected"] = quota_total(plan.quotas);
    auto rej = nlohmann::ordered_json::object();
    for (auto r : kAllReasons) {
      if (r == RejectReason::Ok) continue;
      auto it = rejected.find(r);
      rej[std::string(reason_name(r))] = it == rejected.end() ? 0 : it->second;
    }
    j["rejected"] = std::move(rej);
    if (!template_hash.empty()) j["template_hash"] = template_hash;
    if (!rules_hash.empty()) j["rules_hash"] = rules_hash;
    if (!model.empty()) j["model"] = model;
    if (!transport.empty()) j["transport"] = transport;
    if (!fixture.empty()) j["fixture"] = fixture;
    if (is_eda_method(plan.method)) j["eda_duplicates_kept"] = eda_duplicates_kept;
    auto b = nlohmann::ordered_json::array();
    for (const auto& r : buckets) {
      nlohmann::ordered_json bj;
      bj["bucket"] = bucket_name(r.key);
      bj["quota"] = r.quota;
      bj["accepted"] = r.accepted;
      bj["requests"] = r.requests;
      bj["status"] = status_name(r.status);
      if (!r.error.empty()) bj["error"] = r.error;
      b.push_back(std::move(bj));
    }
    j["buckets"] = std::move(b);
    j["inputs"] = inputs;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
  }
};

struct AugmentationResult {
  Corpus corpus;  // originals followed by accepted variants
  RunManifest manifest;
  std::vector<RejectionRecord> rejections;
  std::vector<nlohmann::ordered_json> prompt_log;  // one entry per generation call

  bool ok() const { return manifest.status == RunStatus::Ok; }
};

namespace detail {

inline void check_train_matches_fold(const Corpus& train, const FoldPlan& fold) {
  if (fold.train_ids.empty()) return;
  std::unordered_set<std::string> ids(fold.train_ids.begin(), fold.train_ids.end());
  if (ids.size() != train.size()) throw Error(ErrorKind::Invalid, "training slice does not match the fold plan");
  for (const auto& m : train.messages) {
    if (!ids.count(m.id)) throw Error(ErrorKind::Invalid, "message '" + m.id + "' is not in the fold's train ids");
    if (m.source != Source::Original) throw Error(ErrorKind::Invalid, "training slice must hold originals only");
  }
}

inline RunStatus worst(RunStatus a, RunStatus b) {
  auto rank = [](RunStatus s) {
    switch (s) {
      case RunStatus::Ok: return 0;
      case RunStatus::AttemptCap: return 1;
      case RunStatus::GatewayFailure: return 2;
      case RunStatus::Interrupted: return 3;
    }
    return 0;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace detail

struct LlmRunOptions {
  std::string model;
  double temperature = kDefaultTemperature;
  std::optional<int> max_tokens;
  std::optional<std::string> system_prompt;
  std::size_t workers = 1;
  const std::atomic<bool>* cancel = nullptr;
};

// Fills every (label, principle) quota by prompting, parsing, validating, and
// deduplicating. Buckets run in parallel; each draws from its own seeded stream
// and cross-bucket duplicates are resolved in bucket-key order after each round,
// so the output never depends on the worker count.
inline AugmentationResult run_llm_augmentation(const AugmentationPlan& plan, const Corpus& train,
                                               const PromptTemplateSet& templates, LlmGateway& gateway,
                                               const Validator& validator, const LlmRunOptions& options) {
  if (is_eda_method(plan.method)) throw Error(ErrorKind::Invalid, "run_llm_augmentation needs an LLM method");
  if (plan.samples_per_prompt == 0 || plan.demos_per_prompt == 0) {
    throw Error(ErrorKind::Invalid, "demo and sample counts must be positive");
  }
  detail::check_train_matches_fold(train, plan.fold);
  templates.validate();
  const auto started = std::chrono::steady_clock::now();

  struct Accept {
    std::string text;
    std::string prompt_id;
  };
  struct Bucket {
    BucketKey key;
    std::size_t quota = 0;
    std::size_t cap = 0;
    std::vector<Message> pool;
    Rng rng{0};
    std::size_t requests = 0;
    std::vector<Accept> accepted;
    Deduper local;
    std::vector<RejectionRecord> rejections;
    std::vector<nlohmann::ordered_json> prompts;
    RunStatus status = RunStatus::Ok;
    std::string error;
  };

  const bool theory = plan.method == Method::LlmTheory;
  std::vector<Bucket> buckets;
  for (const auto& [key, quota] : plan.quotas) {
    Bucket b;
    b.key = key;
    b.quota = quota;
    const auto calls = (quota + plan.samples_per_prompt - 1) / plan.samples_per_prompt;
    b.cap = static_cast<std::size_t>(plan.attempt_cap_multiplier) * calls;
    for (const auto& m : train.messages) {
      if (m.label == key.label && (!key.principle || m.principle == key.principle)) b.pool.push_back(m);
    }
    b.rng = Rng(derive_seed(plan.run_seed, {"llm", method_name(plan.method), bucket_name(key)}));
    if (quota > 0 && b.pool.empty()) {
      throw Error(ErrorKind::Invalid, "no training messages for bucket " + bucket_name(key));
    }
    buckets.push_back(std::move(b));
  }

  Deduper global(train.texts());
  auto fill = [&](Bucket& b) {
    const std::optional<Principle> principle = theory ? b.key.principle : std::nullopt;
    while (b.accepted.size() < b.quota) {
      if (options.cancel && options.cancel->load()) {
        b.status = RunStatus::Interrupted;
        return;
      }
      if (b.requests >= b.cap) {
        b.status = RunStatus::AttemptCap;
        b.error = "attempt cap of " + std::to_string(b.cap) + " requests reached with " +
                  std::to_string(b.accepted.size()) + "/" + std::to_string(b.quota) + " accepted";
        return;
      }
      auto sample = sample_demos(b.pool, principle, plan.demos_per_prompt, b.rng);
      auto bundle = build_prompt(b.key.label, principle, sample.demos, plan.samples_per_prompt, templates);
      ++b.requests;

      nlohmann::ordered_json log;
      log["prompt_id"] = bundle.prompt_id;
      log["bucket"] = bucket_name(b.key);
      log["request_index"] = b.requests;
      std::vector<std::string> demo_ids;
      for (const auto& d : bundle.demos) demo_ids.push_back(d.id);
      log["demo_ids"] = demo_ids;
      log["with_replacement"] = sample.with_replacement;
      b.prompts.push_back(log);

      GenerationRequest req;
      req.model = options.model;
      req.temperature = options.temperature;
      req.max_tokens = options.max_tokens;
      req.system_prompt = options.system_prompt;
      req.prompt = bundle.rendered;
      req.prompt_id = bundle.prompt_id;
      std::string raw;
      try {
        raw = gateway.complete(req);
      } catch (const Error& e) {
        b.status = RunStatus::GatewayFailure;
        b.error = e.what();
        return;
      }
      for (const auto& cand : parse_generation(raw, plan.samples_per_prompt)) {
        if (b.accepted.size() >= b.quota) break;
        auto verdict = validator.validate(cand, b.key.label);
        RejectReason reason = verdict.reason;
        if (verdict.accepted && (global.seen(cand) || !b.local.insert(cand))) reason = RejectReason::Duplicate;
        if (reason != RejectReason::Ok) {
          b.rejections.push_back({content_hash(cand), reason, bundle.prompt_id});
          continue;
        }
        b.accepted.push_back({std::string(text::trim(cand)), bundle.prompt_id});
      }
    }
  };

  std::vector<std::size_t> merged(buckets.size(), 0);
  for (;;) {
    std::vector<Bucket*> active;
    for (auto& b : buckets) {
      if (b.status == RunStatus::Ok && b.accepted.size() < b.quota) active.push_back(&b);
    }
    if (active.empty()) break;

    const auto workers = std::max<std::size_t>(1, std::min(options.workers, active.size()));
    if (workers == 1) {
      for (auto* b : active) fill(*b);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i; (i = next.fetch_add(1)) < active.size();) fill(*active[i]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    // Deterministic merge in bucket-key order.
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      auto& b = buckets[i];
      std::vector<Accept> kept(b.accepted.begin(), b.accepted.begin() + static_cast<std::ptrdiff_t>(merged[i]));
      for (std::size_t a = merged[i]; a < b.accepted.size(); ++a) {
        if (global.insert(b.accepted[a].text)) {
          kept.push_back(std::move(b.accepted[a]));
        } else {
          b.rejections.push_back({content_hash(b.accepted[a].text), RejectReason::Duplicate, b.accepted[a].prompt_id});
        }
      }
      b.accepted = std::move(kept);
      merged[i] = b.accepted.size();
    }
  }

  AugmentationResult result;
  result.corpus = train;
  auto& man = result.manifest;
  man.plan = plan;
  man.template_hash = templates.hash();
  man.rules_hash = validator.rules().hash();
  man.model = options.model;
  man.transport = transport_name(gateway.transport().mode);
  man.fixture = gateway.transport().fixture_path.string();
  man.train_size = train.size();
  for (auto& b : buckets) {
    for (std::size_t a = 0; a < b.accepted.size(); ++a) {
      Message m;
      m.id = std::string(method_name(plan.method)) + "-" + std::string(label_name(b.key.label)) +
             (b.key.principle ? "-" + std::string(principle_code(*b.key.principle)) : "") + "-" +
             text::zero_pad(a + 1, 6);
      m.text = b.accepted[a].text;
      m.label = b.key.label;
      m.source = method_source(plan.method);
      if (theory) m.principle = b.key.principle;
      m.prompt_id = b.accepted[a].prompt_id;
      result.corpus.messages.push_back(std::move(m));
    }
    for (auto& r : b.rejections) {
      man.rejected[r.reason] += 1;
      result.rejections.push_back(std::move(r));
    }
    for (auto& p : b.prompts) result.prompt_log.push_back(std::move(p));
    man.accepted += b.accepted.size();
    man.status = detail::worst(man.status, b.status);
    man.buckets.push_back({b.key, b.quota, b.accepted.size(), b.requests, b.status, b.error});
  }
  man.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

// Produces exactly (factor - 1) variants per training message. Each variant
// retries with fresh derived seeds until its normalized text is new to the run;
// if `novelty_attempts` are exhausted the last variant is kept and counted.
inline AugmentationResult run_eda_augmentation(const AugmentationPlan& plan, const Corpus& train,
                                               const eda::SynonymLexicon& lexicon, const eda::EdaParams& params,
                                               std::size_t novelty_attempts = 32) {
  if (!is_eda_method(plan.method)) throw Error(ErrorKind::Invalid, "run_eda_augmentation needs an EDA method");
  if (plan.factor < 2) throw Error(ErrorKind::Invalid, "augmentation factor must be at least 2");
  if (novelty_attempts == 0) throw Error(ErrorKind::Invalid, "novelty_attempts must be positive");
  params.validate();
  detail::check_train_matches_fold(train, plan.fold);
  const auto started = std::chrono::steady_clock::now();
  const auto technique = method_technique(plan.method);

  AugmentationResult result;
  result.corpus = train;
  auto& man = result.manifest;
  man.plan = plan;
  man.train_size = train.size();

  Deduper seen(train.texts());
  std::map<Label, std::size_t> per_label;
  for (const auto& parent : train.messages) {
    for (int v = 1; v < plan.factor; ++v) {
      eda::EdaResult variant;
      bool novel = false;
      for (std::size_t a = 0; a < novelty_attempts && !novel; ++a) {
        auto p = params;
        p.seed = eda::variant_seed(plan.run_seed, parent.id, technique, static_cast<std::size_t>(v), a);
        variant = eda::apply(technique, parent.text, lexicon, p);
        novel = seen.insert(variant.text);
      }
      if (!novel) man.eda_duplicates_kept += 1;
      Message m;
      m.id = parent.id + "-" + std::string(eda::technique_name(technique)) + "-" + std::to_string(v);
      m.text = std::move(variant.text);
      m.label = parent.label;
      m.source = method_source(plan.method);
      m.principle = parent.principle;
      m.parent_id = parent.id;
      result.corpus.messages.push_back(std::move(m));
      per_label[parent.label] += 1;
    }
  }
  man.accepted = result.corpus.size() - train.size();
  for (const auto& [key, quota] : plan.quotas) {
    man.buckets.push_back({key, quota, per_label[key.label], 0, RunStatus::Ok, {}});
  }
  man.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

// Writes augmented.jsonl, manifest.json, rejections.jsonl and, for LLM runs,
// prompts.jsonl (the provenance log every prompt_id resolves into).
inline void write_run(const std::filesystem::path& dir, const AugmentationResult& result) {
  std::filesystem::create_directories(dir);
  save_corpus(dir / "augmented.jsonl", result.corpus, CorpusFormat::Jsonl);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << result.manifest.to_json().dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "rejections.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& r : result.rejections) out << r.to_json().dump() << '\n';
  }
  if (!is_eda_method(result.manifest.plan.method)) {
    std::ofstream out(dir / "prompts.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& p : result.prompt_log) out << p.dump() << '\n';
  }
}

}  // namespace smishaug
