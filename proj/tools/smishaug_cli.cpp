// smishaug command-line entry point. Every subcommand writes its artifacts and
// a manifest.json under <out>/<run-id>/.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smishaug/smishaug.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace smishaug;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGateway = 3;
constexpr int kExitAttemptCap = 4;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

// Failure carrying its exit code, raised once a run directory may already hold
// partial artifacts.
struct ExitWith {
  int code;
  ErrorKind kind;
  std::string message;
};

struct Globals {
  std::string config_path;
  std::string out;
  std::string run_id;
  std::optional<RunConfig> config;
  std::vector<std::string> argv;
  fs::path current_run_dir;
};

Globals g;

const RunConfig& cfg() {
  static const RunConfig defaults;
  return g.config ? *g.config : defaults;
}

fs::path run_dir(const std::string& default_id) {
  fs::path root = !g.out.empty() ? fs::path(g.out) : cfg().output_root;
  auto dir = root / (g.run_id.empty() ? default_id : g.run_id);
  fs::create_directories(dir);
  g.current_run_dir = dir;
  return dir;
}

std::string abs_string(const fs::path& p) { return p.empty() ? std::string() : fs::absolute(p).lexically_normal().string(); }

ordered_json file_ref(const fs::path& p) {
  ordered_json j;
  j["path"] = abs_string(p);
  j["hash"] = evalkit::file_hash(p);
  return j;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << body;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, ordered_json inputs, ordered_json outputs,
                    ordered_json extra = ordered_json::object()) {
  ordered_json j;
  j["tool"] = "smishaug";
  j["subcommand"] = subcommand;
  j["argv"] = g.argv;
  j["config"] = g.config ? abs_string(g.config->source) : "";
  j["inputs"] = std::move(inputs);
  j["outputs"] = std::move(outputs);
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

template <class T>
T pick(const std::optional<T>& flag, const T& fallback) {
  return flag ? *flag : fallback;
}

fs::path need_path(const std::string& flag_value, const fs::path& config_value, const char* what) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  throw ConfigError({std::string(what) + ": not given on the command line or in the config"});
}

Corpus read_corpus(const fs::path& path, bool drop_ham) {
  if (g.config && g.config->corpus_format && path == g.config->corpus_path) {
    return load_corpus(path, *g.config->corpus_format, drop_ham);
  }
  return load_corpus(path, drop_ham);
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string corpus;
  std::string format;
  bool keep_ham = false;
};

int cmd_ingest(const IngestArgs& a) {
  const auto path = need_path(a.corpus, cfg().corpus_path, "corpus path");
  Corpus corpus;
  const bool drop = a.keep_ham ? false : cfg().drop_ham;
  if (!a.format.empty()) {
    corpus = load_corpus(path, a.format == "jsonl" ? CorpusFormat::Jsonl : CorpusFormat::Csv, drop);
  } else {
    corpus = read_corpus(path, drop);
  }
  validate_corpus(corpus);
  const auto dir = run_dir("ingest");
  save_corpus(dir / "corpus.jsonl", corpus, CorpusFormat::Jsonl);
  ordered_json counts;
  counts["total"] = corpus.size();
  for (auto l : {Label::Smishing, Label::Spam, Label::Ham}) counts[std::string(label_name(l))] = corpus.count(l);
  write_manifest(dir, "ingest", {{"corpus", file_ref(path)}, {"drop_ham", drop}}, {"corpus.jsonl"},
                 {{"counts", counts}});
  std::cout << "messages " << corpus.size() << " (smishing " << corpus.count(Label::Smishing) << ", spam "
            << corpus.count(Label::Spam) << ", ham " << corpus.count(Label::Ham) << ")\n";
  std::cout << "wrote " << (dir / "corpus.jsonl").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FoldsArgs {
  std::string corpus;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
};

int cmd_folds(const FoldsArgs& a) {
  const auto path = need_path(a.corpus, cfg().corpus_path, "corpus path");
  const auto corpus = read_corpus(path, cfg().drop_ham);
  const int k = pick(a.k, static_cast<int>(cfg().k));
  const auto seed = pick(a.seed, cfg().seed);
  const auto folds = make_folds(corpus, k, seed);
  const auto dir = run_dir("folds");
  write_text(dir / "folds.json", folds_to_json(folds).dump(2) + "\n");
  ordered_json outputs = ordered_json::array({"folds.json"});
  for (const auto& f : folds) {
    const auto fd = dir / ("fold-" + std::to_string(f.repeat_index));
    fs::create_directories(fd);
    save_corpus(fd / "train.jsonl", corpus.subset(f.train_ids), CorpusFormat::Jsonl);
    save_corpus(fd / "test.jsonl", corpus.subset(f.test_ids), CorpusFormat::Jsonl);
    outputs.push_back(fd.filename().string() + "/train.jsonl");
    outputs.push_back(fd.filename().string() + "/test.jsonl");
    std::cout << "fold " << f.repeat_index << ": train " << f.train_ids.size() << ", test " << f.test_ids.size()
              << "\n";
  }
  write_manifest(dir, "folds", {{"corpus", file_ref(path)}, {"k", k}, {"seed", seed}}, outputs);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AnnotateArgs {
  std::string annotations;
  std::string overrides;
  std::string corpus;
  std::optional<int> threshold;
};

int cmd_annotate(const AnnotateArgs& a) {
  const auto ann_path = need_path(a.annotations, cfg().annotations_path, "annotation path");
  const auto records = load_annotations(ann_path);
  const int threshold = pick(a.threshold, cfg().vote_threshold);
  std::optional<Corpus> corpus;
  fs::path corpus_path;
  if (!a.corpus.empty() || !cfg().corpus_path.empty()) {
    corpus_path = need_path(a.corpus, cfg().corpus_path, "corpus path");
    corpus = read_corpus(corpus_path, cfg().drop_ham);
  }
  std::vector<AggregationResult> results;
  if (corpus) {
    std::vector<std::string> smishing_ids;
    for (const auto& m : corpus->messages) {
      if (m.label == Label::Smishing) smishing_ids.push_back(m.id);
    }
    results = majority_vote(records, threshold, smishing_ids);
  } else {
    results = majority_vote(records, threshold);
  }
  std::map<std::string, Principle> overrides;
  fs::path overrides_path = !a.overrides.empty() ? fs::path(a.overrides) : cfg().overrides_path;
  if (!overrides_path.empty()) overrides = load_overrides(overrides_path);
  const auto principles = resolve_principles(results, overrides);

  const auto dir = run_dir("annotate");
  {
    std::ofstream out(dir / "aggregation.csv", std::ios::binary | std::ios::trunc);
    write_aggregation(out, results);
  }
  ordered_json inputs = {{"annotations", file_ref(ann_path)}, {"threshold", threshold}};
  if (!overrides_path.empty()) inputs["overrides"] = file_ref(overrides_path);
  ordered_json outputs = ordered_json::array({"aggregation.csv"});
  std::size_t unresolved = 0;
  std::array<std::size_t, kPrincipleCount> dist{};
  for (const auto& r : results) {
    if (!r.decided) ++unresolved;
  }
  for (const auto& [_, p] : principles) dist[principle_index(p)] += 1;
  if (corpus) {
    inputs["corpus"] = file_ref(corpus_path);
    save_corpus(dir / "corpus.jsonl", apply_principles(*corpus, principles), CorpusFormat::Jsonl);
    outputs.push_back("corpus.jsonl");
  }
  std::optional<double> kappa;
  try {
    kappa = fleiss_kappa(records);
  } catch (const Error&) {
    // Unequal annotator counts per item: kappa is undefined, aggregation still stands.
  }
  ordered_json summary;
  summary["messages"] = results.size();
  summary["unresolved_by_vote"] = unresolved;
  summary["overrides"] = overrides.size();
  summary["resolved"] = principles.size();
  for (auto p : kAllPrinciples) summary[std::string(principle_code(p))] = dist[principle_index(p)];
  summary["fleiss_kappa"] = kappa ? ordered_json(*kappa) : ordered_json(nullptr);
  write_manifest(dir, "annotate", inputs, outputs, {{"summary", summary}});
  std::cout << "messages " << results.size() << ", unresolved by vote " << unresolved << ", overrides "
            << overrides.size() << ", resolved " << principles.size() << "\n";
  for (auto p : kAllPrinciples) {
    std::cout << "  " << principle_code(p) << " " << principle_name(p) << ": " << dist[principle_index(p)] << "\n";
  }
  if (kappa) std::cout << "fleiss kappa " << text::fixed(*kappa, 3) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct KappaArgs {
  std::string annotations;
  std::string matrix;
};

std::vector<std::vector<int>> read_count_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::vector<int>> rows;
  for (const auto& rec : csv::read(in)) {
    std::vector<int> row;
    bool numeric = true;
    for (const auto& f : rec.fields) {
      int v = 0;
      if (!config_detail::parse_number(std::string(text::trim(f)), v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(rec.line) + ": non-integer count");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_kappa(const KappaArgs& a) {
  double kappa = 0.0;
  ordered_json inputs;
  if (!a.matrix.empty()) {
    kappa = fleiss_kappa(read_count_matrix(a.matrix));
    inputs["matrix"] = file_ref(a.matrix);
  } else {
    const auto path = need_path(a.annotations, cfg().annotations_path, "annotation path");
    kappa = fleiss_kappa(load_annotations(path));
    inputs["annotations"] = file_ref(path);
  }
  const auto dir = run_dir("kappa");
  ordered_json out;
  out["fleiss_kappa"] = kappa;
  write_text(dir / "kappa.json", out.dump(2) + "\n");
  write_manifest(dir, "kappa", inputs, {"kappa.json"});
  std::cout << text::fixed(kappa, 3) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AugmentArgs {
  std::string method;
  std::optional<int> factor;
  std::string train;
  std::string corpus;
  std::string folds;
  std::optional<int> fold;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string transport;
  std::string fixture;
  std::string model;
  std::string templates;
  std::string lexicon;
};

// Everything needed to re-run an augmentation; stored as manifest "inputs".
struct AugmentJob {
  Method method = Method::EdaSR;
  int factor = 2;
  fs::path train;  // a pre-sliced training file, or
  fs::path corpus;
  fs::path folds;
  int fold = 0;
  std::uint64_t seed = 0;
  fs::path templates;
  fs::path lexicon;
  fs::path stopwords;
  double alpha = 0.1;
  ValidationRules rules;
  std::string model;
  double temperature = kDefaultTemperature;
  std::optional<int> max_tokens;
  std::optional<std::string> system_prompt;
  Transport transport = Transport::Replay;
  fs::path fixture;
  std::size_t demos_per_prompt = 5;
  std::size_t samples_per_prompt = 10;
  int attempt_cap_multiplier = 20;
  bool theory_on_spam = false;

  ordered_json to_json() const {
    ordered_json j;
    j["method"] = method_name(method);
    j["factor"] = factor;
    if (!train.empty()) {
      j["train"] = file_ref(train);
    } else {
      j["corpus"] = file_ref(corpus);
      j["folds"] = file_ref(folds);
      j["fold"] = fold;
    }
    j["seed"] = seed;
    if (is_eda_method(method)) {
      j["alpha"] = alpha;
      j["lexicon"] = abs_string(lexicon);
      j["stopwords"] = abs_string(stopwords);
    } else {
      j["templates"] = abs_string(templates);
      j["rules"] = rules.to_json();
      j["model"] = model;
      j["temperature"] = temperature;
      j["max_tokens"] = max_tokens ? ordered_json(*max_tokens) : ordered_json(nullptr);
      j["system_prompt"] = system_prompt ? ordered_json(*system_prompt) : ordered_json(nullptr);
      j["transport"] = transport_name(transport);
      j["fixture"] = abs_string(fixture);
      j["demos_per_prompt"] = demos_per_prompt;
      j["samples_per_prompt"] = samples_per_prompt;
      j["attempt_cap_multiplier"] = attempt_cap_multiplier;
      j["theory_on_spam"] = theory_on_spam;
    }
    return j;
  }

  static AugmentJob from_json(const nlohmann::json& j) {
    AugmentJob s;
    auto m = parse_method(j.at("method").get<std::string>());
    if (!m) throw Error(ErrorKind::Parse, "manifest names an unknown method");
    s.method = *m;
    s.factor = j.at("factor").get<int>();
    if (j.contains("train")) {
      s.train = j.at("train").at("path").get<std::string>();
    } else {
      s.corpus = j.at("corpus").at("path").get<std::string>();
      s.folds = j.at("folds").at("path").get<std::string>();
      s.fold = j.at("fold").get<int>();
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    s.alpha = j.value("alpha", s.alpha);
    s.lexicon = j.value("lexicon", std::string());
    s.stopwords = j.value("stopwords", std::string());
    s.templates = j.value("templates", std::string());
    if (j.contains("rules")) s.rules = ValidationRules::from_json(j.at("rules"));
    s.model = j.value("model", std::string());
    s.temperature = j.value("temperature", kDefaultTemperature);
    if (j.contains("max_tokens") && !j["max_tokens"].is_null()) s.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("system_prompt") && !j["system_prompt"].is_null()) {
      s.system_prompt = j["system_prompt"].get<std::string>();
    }
    if (j.contains("transport")) s.transport = parse_transport(j["transport"].get<std::string>()).value();
    s.fixture = j.value("fixture", std::string());
    s.demos_per_prompt = j.value("demos_per_prompt", s.demos_per_prompt);
    s.samples_per_prompt = j.value("samples_per_prompt", s.samples_per_prompt);
    s.attempt_cap_multiplier = j.value("attempt_cap_multiplier", s.attempt_cap_multiplier);
    s.theory_on_spam = j.value("theory_on_spam", s.theory_on_spam);
    return s;
  }
};

struct TrainSlice {
  Corpus train;
  FoldPlan fold;
};

TrainSlice load_train_slice(const AugmentJob& s) {
  TrainSlice t;
  if (!s.train.empty()) {
    t.train = load_corpus(s.train, true);
    t.fold.repeat_index = s.fold;
    return t;
  }
  const auto corpus = load_corpus(s.corpus, true);
  const auto folds = load_folds(s.folds);
  if (s.fold < 0 || static_cast<std::size_t>(s.fold) >= folds.size()) {
    throw Error(ErrorKind::Invalid, "fold index " + std::to_string(s.fold) + " out of range");
  }
  t.fold = folds[static_cast<std::size_t>(s.fold)];
  t.train = corpus.subset(t.fold.train_ids);
  return t;
}

AugmentationResult execute_augment(const AugmentJob& s, std::size_t workers, const HttpPoster& poster = {}) {
  auto slice = load_train_slice(s);
  auto plan = make_plan(slice.train, s.method, s.factor, slice.fold, s.seed, s.theory_on_spam);
  plan.demos_per_prompt = s.demos_per_prompt;
  plan.samples_per_prompt = s.samples_per_prompt;
  plan.attempt_cap_multiplier = s.attempt_cap_multiplier;
  AugmentationResult result;
  if (is_eda_method(s.method)) {
    eda::EdaParams params;
    params.alpha = s.alpha;
    params.seed = s.seed;
    params.stopwords = s.stopwords.empty() ? eda::default_stopwords() : eda::load_stopwords(s.stopwords);
    if (s.lexicon.empty()) {
      result = run_eda_augmentation(plan, slice.train, eda::SynonymLexicon::builtin(), params);
    } else {
      result = run_eda_augmentation(plan, slice.train, eda::SynonymLexicon::load(s.lexicon), params);
    }
  } else {
    const auto templates =
        s.templates.empty() ? PromptTemplateSet::defaults() : PromptTemplateSet::load(s.templates);
    Validator validator(s.rules);
    GatewayConfig gc = g.config ? g.config->gateway : GatewayConfig{};
    const auto env = GatewayConfig::from_env();
    if (gc.endpoint_url.empty()) gc.endpoint_url = env.endpoint_url;
    if (gc.api_key.empty()) gc.api_key = env.api_key;
    LlmGateway gateway(gc, TransportMode{s.transport, s.fixture}, poster);
    LlmRunOptions opts;
    opts.model = s.model;
    opts.temperature = s.temperature;
    opts.max_tokens = s.max_tokens;
    opts.system_prompt = s.system_prompt;
    opts.workers = workers;
    opts.cancel = &g_interrupted;
    result = run_llm_augmentation(plan, slice.train, templates, gateway, validator, opts);
  }
  result.manifest.inputs = s.to_json();
  return result;
}

int status_exit(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return kExitOk;
    case RunStatus::AttemptCap: return kExitAttemptCap;
    case RunStatus::GatewayFailure: return kExitGateway;
    case RunStatus::Interrupted: return kExitInterrupted;
  }
  return kExitFailure;
}

ErrorKind status_kind(RunStatus s) {
  return s == RunStatus::AttemptCap ? ErrorKind::AttemptCap : ErrorKind::Gateway;
}

int cmd_augment(const AugmentArgs& a) {
  const auto& c = cfg();
  AugmentJob s;
  std::string method_text = a.method;
  if (method_text.empty()) {
    if (c.methods.size() != 1) throw ConfigError({"--method: required unless the config lists exactly one method"});
    method_text = std::string(method_name(c.methods.front()));
  }
  auto method = parse_method(method_text);
  if (!method) throw ConfigError({"--method: unknown method '" + method_text + "'"});
  s.method = *method;
  if (a.factor) {
    s.factor = *a.factor;
  } else if (c.factors.size() == 1) {
    s.factor = c.factors.front();
  } else {
    throw ConfigError({"--factor: required unless the config lists exactly one factor"});
  }
  if (!c.allowed_factors.count(s.factor)) {
    throw ConfigError({"--factor: " + std::to_string(s.factor) + " is not among the allowed factors"});
  }
  if (!a.train.empty()) {
    s.train = a.train;
    s.fold = a.fold.value_or(0);
  } else {
    s.corpus = need_path(a.corpus, c.corpus_path, "corpus path (or --train)");
    if (a.folds.empty()) throw ConfigError({"--folds: required with --corpus"});
    s.folds = a.folds;
    s.fold = a.fold.value_or(0);
  }
  s.seed = pick(a.seed, c.seed);
  s.templates = !a.templates.empty() ? fs::path(a.templates) : c.templates_path;
  s.lexicon = !a.lexicon.empty() ? fs::path(a.lexicon) : c.lexicon_path;
  s.stopwords = c.stopwords_path;
  s.alpha = c.alpha;
  s.rules = c.rules;
  s.model = !a.model.empty() ? a.model : c.model;
  s.temperature = c.temperature;
  s.max_tokens = c.max_tokens;
  s.system_prompt = c.system_prompt;
  s.transport = c.transport;
  if (!a.transport.empty()) {
    auto t = parse_transport(a.transport);
    if (!t) throw ConfigError({"--transport: expected live, record or replay"});
    s.transport = *t;
  }
  s.fixture = !a.fixture.empty() ? fs::path(a.fixture) : c.fixture_path;
  if (!is_eda_method(s.method) && s.transport != Transport::Live && s.fixture.empty()) {
    throw ConfigError({"--fixture: record and replay transports need a fixture path"});
  }
  s.demos_per_prompt = c.demos_per_prompt;
  s.samples_per_prompt = c.samples_per_prompt;
  s.attempt_cap_multiplier = c.attempt_cap_multiplier;
  s.theory_on_spam = c.theory_on_spam;

  const auto dir = run_dir(std::string(method_name(s.method)) + "-x" + std::to_string(s.factor) + "-fold" +
                           std::to_string(s.fold));
  auto result = execute_augment(s, pick(a.workers, c.workers));
  write_run(dir, result);
  const auto& man = result.manifest;
  std::cout << method_name(s.method) << " x" << s.factor << ": " << result.corpus.size() << " messages ("
            << man.train_size << " original + " << man.accepted << " generated), status " << status_name(man.status)
            << "\n";
  std::cout << "wrote " << (dir / "augmented.jsonl").string() << "\n";
  if (!result.ok()) {
    std::string detail;
    for (const auto& b : man.buckets) {
      if (!b.error.empty()) detail += "; " + bucket_name(b.key) + ": " + b.error;
    }
    throw ExitWith{status_exit(man.status), status_kind(man.status),
                   "augmentation ended with status " + std::string(status_name(man.status)) + detail};
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReplayVerifyArgs {
  std::string run;
  std::optional<std::size_t> workers;
};

int cmd_replay_verify(const ReplayVerifyArgs& a) {
  const fs::path src = a.run;
  std::ifstream in(src / "manifest.json");
  if (!in) throw Error(ErrorKind::Io, "no manifest.json in " + src.string());
  const auto manifest = nlohmann::json::parse(in);
  auto job = AugmentJob::from_json(manifest.at("inputs"));
  if (!is_eda_method(job.method)) job.transport = Transport::Replay;
  const auto dir = run_dir("replay-verify");
  const auto rerun_dir = dir / "rerun";
  auto result = execute_augment(job, pick(a.workers, std::size_t{1}));
  write_run(rerun_dir, result);

  ordered_json diffs = ordered_json::array();
  std::vector<std::string> files{"augmented.jsonl", "rejections.jsonl"};
  if (!is_eda_method(job.method)) files.push_back("prompts.jsonl");
  for (const auto& f : files) {
    std::ifstream x(src / f, std::ios::binary), y(rerun_dir / f, std::ios::binary);
    std::string lx, ly;
    std::size_t line = 0;
    for (;;) {
      const bool gx = static_cast<bool>(std::getline(x, lx));
      const bool gy = static_cast<bool>(std::getline(y, ly));
      ++line;
      if (!gx && !gy) break;
      if (gx != gy || lx != ly) {
        diffs.push_back({{"file", f}, {"line", line}, {"original", gx ? lx : ""}, {"rerun", gy ? ly : ""}});
        std::cout << f << ":" << line << " differs\n";
        break;
      }
    }
  }
  ordered_json report;
  report["run"] = abs_string(src);
  report["identical"] = diffs.empty();
  report["diffs"] = diffs;
  write_text(dir / "verify.json", report.dump(2) + "\n");
  write_manifest(dir, "replay-verify", {{"run", abs_string(src)}, {"manifest", file_ref(src / "manifest.json")}},
                 {"verify.json", "rerun/augmented.jsonl"});
  if (!diffs.empty()) {
    throw ExitWith{kExitFailure, ErrorKind::Invalid, "replay output differs from " + src.string()};
  }
  std::cout << "replay identical: empty diff over " << files.size() << " files\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> inputs;
  std::string std_kind = "population";
  bool trim = false;
  bool by_source = false;
};

int cmd_stats(const StatsArgs& a) {
  std::vector<std::string> inputs = a.inputs;
  if (inputs.empty() && !cfg().corpus_path.empty()) inputs.push_back(cfg().corpus_path.string());
  if (inputs.empty()) throw ConfigError({"--input: at least one corpus is required"});
  DescribeOptions opts;
  if (a.std_kind == "sample") opts.std_kind = StdKind::Sample;
  else if (a.std_kind != "population") throw ConfigError({"--std: expected population or sample"});
  opts.trim = a.trim;

  std::vector<StatsRow> rows;
  ordered_json in = ordered_json::array();
  for (const auto& entry : inputs) {
    std::string name;
    fs::path path = entry;
    if (auto eq = entry.find('='); eq != std::string::npos) {
      name = entry.substr(0, eq);
      path = entry.substr(eq + 1);
    } else {
      name = path.stem().string();
    }
    const auto corpus = read_corpus(path, cfg().drop_ham);
    in.push_back({{"name", name}, {"file", file_ref(path)}});
    if (a.by_source) {
      std::map<Source, std::vector<std::string>> groups;
      for (const auto& m : corpus.messages) groups[m.source].push_back(m.text);
      for (const auto& [src, texts] : groups) {
        rows.push_back({name + "/" + std::string(source_name(src)), describe(texts, opts)});
      }
    } else {
      rows.push_back({name, describe(corpus.texts(), opts)});
    }
  }
  const auto dir = run_dir("stats");
  std::ostringstream txt, csvs;
  render_stats_text(txt, rows, opts.std_kind);
  render_stats_csv(csvs, rows);
  write_text(dir / "stats.txt", txt.str());
  write_text(dir / "stats.csv", csvs.str());
  write_manifest(dir, "stats", {{"inputs", in}, {"std", a.std_kind}, {"trim", opts.trim}},
                 {"stats.txt", "stats.csv"});
  std::cout << txt.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string train;
  std::string test;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> models;
  std::string method = "original";
  int factor = 1;
  int fold = 0;
  std::optional<int> epochs;
};

int cmd_eval(const EvalArgs& a) {
  std::vector<evalkit::ModelConfig> models;
  if (a.models.empty()) {
    models = cfg().models;
  } else {
    std::vector<std::string> bad;
    for (const auto& name : a.models) {
      if (auto m = evalkit::model_config_by_name(name)) models.push_back(*m);
      else bad.push_back("--model: unknown model config '" + name + "'");
    }
    if (!bad.empty()) throw ConfigError(bad);
  }
  const auto dir = run_dir("eval-" + a.method + "-x" + std::to_string(a.factor) + "-fold" + std::to_string(a.fold));
  ordered_json records = ordered_json::array();
  ordered_json logs = ordered_json::array();
  for (const auto& model : models) {
    evalkit::TrainHyper hyper;
    hyper.config = model;
    hyper.seed = pick(a.seed, cfg().seed);
    hyper.epochs = pick(a.epochs, cfg().epochs);
    evalkit::AccessLog log;
    auto rec = evalkit::evaluate_files(a.train, a.test, hyper, &log);
    rec.method = a.method;
    rec.factor = a.factor;
    rec.fold = a.fold;
    records.push_back(rec.to_json());
    logs.push_back({{"model", model.name}, {"events", log.events}});
    const auto& m = rec.metrics;
    std::cout << model.name << ": P " << evalkit::pct(m.precision) << "  R " << evalkit::pct(m.recall) << "  Acc "
              << evalkit::pct(m.accuracy) << "  F1 " << evalkit::pct(m.f1) << "\n";
  }
  ordered_json out;
  out["evaluations"] = records;
  out["access_log"] = logs;
  write_text(dir / "eval.json", out.dump(2) + "\n");
  write_manifest(dir, "eval",
                 {{"train", file_ref(a.train)}, {"test", file_ref(a.test)}, {"seed", pick(a.seed, cfg().seed)}},
                 {"eval.json"});
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> runs;
};

int cmd_report(const ReportArgs& a) {
  std::vector<fs::path> dirs;
  for (const auto& r : a.runs) {
    const fs::path p = r;
    if (fs::exists(p / "eval.json")) {
      dirs.push_back(p);
      continue;
    }
    if (!fs::is_directory(p)) throw Error(ErrorKind::Io, "not a directory: " + p.string());
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.is_directory() && fs::exists(e.path() / "eval.json")) found.push_back(e.path());
    }
    if (found.empty()) throw Error(ErrorKind::Io, "no eval.json under " + p.string());
    std::sort(found.begin(), found.end());
    dirs.insert(dirs.end(), found.begin(), found.end());
  }
  const auto report = evalkit::compare_run_dirs(dirs);
  const auto dir = run_dir("report");
  std::ostringstream txt, csvs;
  evalkit::render_report_text(txt, report);
  evalkit::render_report_csv(csvs, report);
  write_text(dir / "report.txt", txt.str());
  write_text(dir / "report.csv", csvs.str());
  ordered_json in = ordered_json::array();
  for (const auto& d : dirs) in.push_back(file_ref(d / "eval.json"));
  write_manifest(dir, "report", {{"evaluations", in}}, {"report.txt", "report.csv"});
  std::cout << txt.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------

void emit_error(int code, ErrorKind kind, const std::string& message, const std::vector<std::string>& violations) {
  ordered_json j;
  j["status"] = "error";
  j["exit_code"] = code;
  j["kind"] = error_kind_name(kind);
  j["message"] = message;
  if (!violations.empty()) j["violations"] = violations;
  std::cerr << j.dump() << "\n";
  if (!g.current_run_dir.empty()) {
    try {
      write_text(g.current_run_dir / "error.json", j.dump(2) + "\n");
    } catch (...) {
    }
  }
}

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Gateway:
    case ErrorKind::ReplayMiss:
    case ErrorKind::MalformedResponse: return kExitGateway;
    case ErrorKind::AttemptCap: return kExitAttemptCap;
    default: return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  g.argv.assign(argv, argv + argc);
  std::signal(SIGINT, on_sigint);

  CLI::App app{"smishaug: smishing corpus augmentation and evaluation toolkit"};
  app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
  app.require_subcommand(1);
  app.add_option("--config", g.config_path, "Run configuration file (INI)")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output root (default from config, else ./runs)");
  app.add_option("--run-id", g.run_id, "Run directory name under the output root");

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Load and validate a labeled corpus; write corpus.jsonl");
  s_ingest->add_option("--corpus", ingest.corpus, "Corpus file (.csv or .jsonl)");
  s_ingest->add_option("--format", ingest.format, "Force the format")->check(CLI::IsMember({"csv", "jsonl"}));
  s_ingest->add_flag("--keep-ham", ingest.keep_ham, "Keep ham rows instead of dropping them");

  FoldsArgs folds;
  auto* s_folds = app.add_subcommand("folds", "Build disjoint stratified k-fold splits");
  s_folds->add_option("--corpus", folds.corpus, "Corpus file");
  s_folds->add_option("--k", folds.k, "Number of folds");
  s_folds->add_option("--seed", folds.seed, "Fold seed");

  AnnotateArgs annotate;
  auto* s_annotate = app.add_subcommand("annotate", "Aggregate principle annotations by majority vote");
  s_annotate->add_option("--annotations", annotate.annotations, "Annotation file (message_id,annotator_id,principle)");
  s_annotate->add_option("--overrides", annotate.overrides, "Adjudication overrides (message_id,principle)");
  s_annotate->add_option("--corpus", annotate.corpus, "Corpus to receive the resolved principles");
  s_annotate->add_option("--threshold", annotate.threshold, "Votes needed to decide (default 3)");

  KappaArgs kappa;
  auto* s_kappa = app.add_subcommand("kappa", "Fleiss' kappa over annotations or a count matrix");
  auto* o_ann = s_kappa->add_option("--annotations", kappa.annotations, "Annotation file");
  auto* o_mat = s_kappa->add_option("--matrix", kappa.matrix, "CSV of per-item category counts");
  o_ann->excludes(o_mat);

  AugmentArgs augment;
  auto* s_augment = app.add_subcommand("augment", "Augment one training fold by EDA or LLM generation");
  s_augment->add_option("--method", augment.method, "eda-sr|eda-ri|eda-rs|eda-rd|llm-theory|llm-plain");
  s_augment->add_option("--factor", augment.factor, "Target size as a multiple of the train slice");
  s_augment->add_option("--train", augment.train, "Pre-sliced training file");
  s_augment->add_option("--corpus", augment.corpus, "Full corpus (with --folds and --fold)");
  s_augment->add_option("--folds", augment.folds, "folds.json from the folds subcommand");
  s_augment->add_option("--fold", augment.fold, "Fold index");
  s_augment->add_option("--seed", augment.seed, "Run seed");
  s_augment->add_option("--workers", augment.workers, "Parallel buckets for LLM runs");
  s_augment->add_option("--transport", augment.transport, "live|record|replay");
  s_augment->add_option("--fixture", augment.fixture, "Replay/record fixture (JSONL)");
  s_augment->add_option("--model", augment.model, "Model id sent to the endpoint");
  s_augment->add_option("--templates", augment.templates, "Prompt template file");
  s_augment->add_option("--lexicon", augment.lexicon, "Synonym lexicon (word<TAB>syn,syn)");

  StatsArgs stats;
  auto* s_stats = app.add_subcommand("stats", "Character and word count statistics per dataset");
  s_stats->add_option("--input", stats.inputs, "Corpus file, optionally NAME=PATH; repeatable");
  s_stats->add_option("--std", stats.std_kind, "population|sample")->check(CLI::IsMember({"population", "sample"}));
  s_stats->add_flag("--trim", stats.trim, "Trim surrounding whitespace before counting");
  s_stats->add_flag("--by-source", stats.by_source, "One row per message source within each input");

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "Train a linear classifier on one split and score the test fold");
  s_eval->add_option("--train", eval.train, "Training file")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--test", eval.test, "Test file")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--seed", eval.seed, "Model seed");
  s_eval->add_option("--model", eval.models, "linear-unigram|linear-bigram; repeatable");
  s_eval->add_option("--method", eval.method, "Method label recorded in eval.json");
  s_eval->add_option("--factor", eval.factor, "Factor label recorded in eval.json");
  s_eval->add_option("--fold", eval.fold, "Fold index recorded in eval.json");
  s_eval->add_option("--epochs", eval.epochs, "Gradient iterations");

  ReportArgs report;
  auto* s_report = app.add_subcommand("report", "Compare eval runs in a method x factor x model table");
  s_report->add_option("--runs", report.runs, "Run directories, or parents of run directories")->required();

  ReplayVerifyArgs rv;
  auto* s_rv = app.add_subcommand("replay-verify", "Re-run an augmentation from its manifest and diff outputs");
  s_rv->add_option("--run", rv.run, "Augmentation run directory")->required()->check(CLI::ExistingDirectory);
  s_rv->add_option("--workers", rv.workers, "Parallel buckets for the re-run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    emit_error(kExitConfig, ErrorKind::Config, e.what(), {});
    return kExitConfig;
  }

  try {
    if (!g.config_path.empty()) g.config = load_run_config(g.config_path);
    int rc = kExitOk;
    if (s_ingest->parsed()) rc = cmd_ingest(ingest);
    else if (s_folds->parsed()) rc = cmd_folds(folds);
    else if (s_annotate->parsed()) rc = cmd_annotate(annotate);
    else if (s_kappa->parsed()) rc = cmd_kappa(kappa);
    else if (s_augment->parsed()) rc = cmd_augment(augment);
    else if (s_stats->parsed()) rc = cmd_stats(stats);
    else if (s_eval->parsed()) rc = cmd_eval(eval);
    else if (s_report->parsed()) rc = cmd_report(report);
    else if (s_rv->parsed()) rc = cmd_replay_verify(rv);
    return rc;
  } catch (const ExitWith& e) {
    emit_error(e.code, e.kind, e.message, {});
    return e.code;
  } catch (const ConfigError& e) {
    emit_error(kExitConfig, ErrorKind::Config, e.what(), e.violations());
    return kExitConfig;
  } catch (const Error& e) {
    const int code = g_interrupted ? kExitInterrupted : exit_for(e.kind());
    emit_error(code, e.kind(), e.what(), {});
    return code;
  } catch (const std::exception& e) {
    emit_error(kExitFailure, ErrorKind::Invalid, e.what(), {});
    return kExitFailure;
  }
}
