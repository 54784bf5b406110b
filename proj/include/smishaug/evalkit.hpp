#pragma once

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <regex>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "smishaug/corpus.hpp"
#include "smishaug/csv.hpp"
#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/text.hpp"
#include "smishaug/validator.hpp"

namespace smishaug::evalkit {

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

struct ModelConfig {
  std::string name = "linear-bigram";
  bool bigrams = true;
};

inline std::vector<ModelConfig> default_model_configs() {
  return {{"linear-unigram", false}, {"linear-bigram", true}};
}

inline std::optional<ModelConfig> model_config_by_name(std::string_view name) {
  for (auto& c : default_model_configs()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

// Lowercased alphanumeric words. URLs and phone numbers are pulled out first
// and kept whole: each URL as one token plus "__url__", each phone as "__phone__".
inline std::vector<std::string> terms(std::string_view input, bool bigrams) {
  static const Validator shapes;
  std::string rest(input);
  std::vector<std::string> out;
  auto extract = [&](const std::regex& re, const char* marker, bool keep_literal) {
    std::string replaced;
    auto begin = std::sregex_iterator(rest.begin(), rest.end(), re);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      replaced.append(rest, last, static_cast<std::size_t>(m.position()) - last);
      replaced += ' ';
      last = static_cast<std::size_t>(m.position() + m.length());
      out.emplace_back(marker);
      if (keep_literal) out.push_back(text::to_lower(m.str()));
    }
    replaced.append(rest, last, std::string::npos);
    rest = std::move(replaced);
  };
  extract(shapes.url_regex(), "__url__", true);
  extract(shapes.phone_regex(), "__phone__", false);

  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : rest) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  for (std::size_t i = 0; i < words.size(); ++i) {
    out.push_back(words[i]);
    if (bigrams && i + 1 < words.size()) out.push_back(words[i] + " " + words[i + 1]);
  }
  return out;
}

struct SparseVector {
  std::vector<std::uint32_t> index;  // ascending
  std::vector<double> value;
};

// Vocabulary and idf come from the training split only. Weighting is raw term
// frequency times idf = ln(N / df) + 1, rows L2-normalized.
class FeatureSpace {
 public:
  static FeatureSpace build(const std::vector<std::vector<std::string>>& docs) {
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
      std::set<std::string> uniq(d.begin(), d.end());
      for (const auto& t : uniq) df[t] += 1;
    }
    FeatureSpace fs;
    const double n = static_cast<double>(docs.size());
    for (const auto& [term, count] : df) {
      fs.index_.emplace(term, static_cast<std::uint32_t>(fs.idf_.size()));
      fs.idf_.push_back(std::log(n / static_cast<double>(count)) + 1.0);
    }
    return fs;
  }

  std::size_t dimension() const { return idf_.size(); }

  SparseVector transform(const std::vector<std::string>& doc) const {
    std::map<std::uint32_t, double> tf;
    for (const auto& t : doc) {
      auto it = index_.find(t);
      if (it != index_.end()) tf[it->second] += 1.0;
    }
    SparseVector v;
    double norm = 0.0;
    for (const auto& [i, f] : tf) {
      const double w = f * idf_[i];
      v.index.push_back(i);
      v.value.push_back(w);
      norm += w * w;
    }
    if (norm > 0) {
      norm = std::sqrt(norm);
      for (auto& w : v.value) w /= norm;
    }
    return v;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> idf_;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct TrainHyper {
  ModelConfig config;
  std::vector<double> l2_grid{1e-4, 1e-3, 1e-2};
  int epochs = 300;
  std::uint64_t seed = 0;
  std::size_t cv_folds = 3;
};

struct LinearModel {
  ModelConfig config;
  FeatureSpace features;
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  std::vector<double> cv_accuracy;  // per l2_grid entry; empty when CV was skipped

  double decision(const SparseVector& x) const {
    double z = bias;
    for (std::size_t k = 0; k < x.index.size(); ++k) z += weights[x.index[k]] * x.value[k];
    return z;
  }

  double decision(std::string_view text) const { return decision(features.transform(terms(text, config.bigrams))); }

  Label predict(std::string_view text) const { return decision(text) > 0.0 ? Label::Smishing : Label::Spam; }
};

namespace detail {

struct Dataset {
  std::vector<SparseVector> x;
  std::vector<double> y;  // +1 smishing, -1 spam
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Accelerated full-batch gradient descent on mean logistic loss + l2/2 |w|^2.
// Rows are unit-norm, so 1/L with L = 0.25 * 2 + l2 is a safe step.
inline void fit(const Dataset& data, const std::vector<std::size_t>& rows, std::size_t dim, double l2,
                int epochs, std::vector<double>& w_out, double& b_out) {
  std::vector<double> w(dim, 0.0), v(dim, 0.0), grad(dim, 0.0), w_next(dim);
  double b = 0.0, vb = 0.0, t = 1.0;
  const double step = 1.0 / (0.5 + l2);
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (int e = 0; e < epochs; ++e) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (auto r : rows) {
      const auto& x = data.x[r];
      double z = vb;
      for (std::size_t k = 0; k < x.index.size(); ++k) z += v[x.index[k]] * x.value[k];
      const double g = -data.y[r] * sigmoid(-data.y[r] * z);
      for (std::size_t k = 0; k < x.index.size(); ++k) grad[x.index[k]] += g * x.value[k];
      gb += g;
    }
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < dim; ++i) {
      w_next[i] = v[i] - step * (grad[i] * inv_n + l2 * v[i]);
      v[i] = w_next[i] + momentum * (w_next[i] - w[i]);
    }
    const double b_next = vb - step * gb * inv_n;
    vb = b_next + momentum * (b_next - b);
    b = b_next;
    w.swap(w_next);
    t = t_next;
  }
  w_out = std::move(w);
  b_out = b;
}

inline double label_sign(Label l) {
  if (l == Label::Smishing) return 1.0;
  if (l == Label::Spam) return -1.0;
  throw Error(ErrorKind::Invalid, "evaluation corpora hold smishing and spam only");
}

}  // namespace detail

// Picks l2 from the grid by cross-validated accuracy (folds keyed by a hash of
// the normalized text, so duplicated examples always share a fold), then fits
// on the whole training set.
inline LinearModel train(const Corpus& corpus, const TrainHyper& hyper) {
  if (hyper.l2_grid.empty()) throw Error(ErrorKind::Invalid, "empty regularization grid");
  if (hyper.epochs <= 0) throw Error(ErrorKind::Invalid, "epoch cap must be positive");
  detail::Dataset data;
  std::vector<std::vector<std::string>> docs;
  std::size_t positives = 0;
  for (const auto& m : corpus.messages) {
    data.y.push_back(detail::label_sign(m.label));
    if (m.label == Label::Smishing) ++positives;
    docs.push_back(terms(m.text, hyper.config.bigrams));
  }
  if (positives == 0 || positives == corpus.size()) {
    throw Error(ErrorKind::Invalid, "training set must contain both smishing and spam");
  }

  LinearModel model;
  model.config = hyper.config;
  model.features = FeatureSpace::build(docs);
  for (const auto& d : docs) data.x.push_back(model.features.transform(d));
  const auto dim = model.features.dimension();

  model.l2 = hyper.l2_grid[hyper.l2_grid.size() / 2];
  const std::size_t minority = std::min(positives, corpus.size() - positives);
  if (hyper.l2_grid.size() > 1 && hyper.cv_folds >= 2 && minority >= hyper.cv_folds && corpus.size() >= 10) {
    std::vector<std::size_t> fold_of(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      fold_of[i] = derive_seed(hyper.seed, {"cv", text::normalize(corpus.messages[i].text)}) % hyper.cv_folds;
    }
    double best = -1.0;
    for (double l2 : hyper.l2_grid) {
      std::size_t correct = 0, total = 0;
      for (std::size_t f = 0; f < hyper.cv_folds; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < corpus.size(); ++i) (fold_of[i] == f ? te : tr).push_back(i);
        if (tr.empty() || te.empty()) continue;
        std::vector<double> w;
        double b = 0.0;
        detail::fit(data, tr, dim, l2, hyper.epochs, w, b);
        for (auto i : te) {
          double z = b;
          for (std::size_t k = 0; k < data.x[i].index.size(); ++k) z += w[data.x[i].index[k]] * data.x[i].value[k];
          if ((z > 0.0) == (data.y[i] > 0.0)) ++correct;
          ++total;
        }
      }
      const double acc = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
      model.cv_accuracy.push_back(acc);
      if (acc > best) {
        best = acc;
        model.l2 = l2;
      }
    }
  }

  std::vector<std::size_t> all(corpus.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  detail::fit(data, all, dim, model.l2, hyper.epochs, model.weights, model.bias);
  return model;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

// Smishing is the positive class. Zero denominators give 0 and raise a flag.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  Confusion confusion;
  bool precision_undefined = false;
  bool recall_undefined = false;

  nlohmann::ordered_json to_json() const {
    return {{"precision", precision}, {"recall", recall}, {"accuracy", accuracy}, {"f1", f1},
            {"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn},
            {"precision_undefined", precision_undefined}, {"recall_undefined", recall_undefined}};
  }

  static Metrics from_json(const nlohmann::json& j) {
    Metrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.confusion = {j.value("tp", std::size_t{0}), j.value("fp", std::size_t{0}), j.value("fn", std::size_t{0}),
                   j.value("tn", std::size_t{0})};
    m.precision_undefined = j.value("precision_undefined", false);
    m.recall_undefined = j.value("recall_undefined", false);
    return m;
  }
};

inline Metrics metrics_from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const auto pred_pos = c.tp + c.fp;
  const auto actual_pos = c.tp + c.fn;
  m.precision_undefined = pred_pos == 0;
  m.recall_undefined = actual_pos == 0;
  m.precision = pred_pos ? static_cast<double>(c.tp) / static_cast<double>(pred_pos) : 0.0;
  m.recall = actual_pos ? static_cast<double>(c.tp) / static_cast<double>(actual_pos) : 0.0;
  m.accuracy = c.total() ? static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

inline Confusion confusion_of(const std::vector<Label>& truth, const std::vector<Label>& predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorKind::Invalid, "prediction count mismatch");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == Label::Smishing, p = predicted[i] == Label::Smishing;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline Metrics evaluate(const LinearModel& model, const Corpus& test) {
  if (test.empty()) throw Error(ErrorKind::Invalid, "empty test corpus");
  std::vector<Label> truth, pred;
  for (const auto& m : test.messages) {
    detail::label_sign(m.label);
    truth.push_back(m.label);
    pred.push_back(model.predict(m.text));
  }
  return metrics_from_confusion(confusion_of(truth, pred));
}

// ---------------------------------------------------------------------------
// File-level evaluation with an access trail
// ---------------------------------------------------------------------------

struct AccessLog {
  std::vector<std::string> events;
  void note(std::string e) { events.push_back(std::move(e)); }
};

struct EvalRecord {
  std::string method = "original";
  int factor = 1;
  std::string model;
  int fold = 0;
  std::string test_hash;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  Metrics metrics;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["factor"] = factor;
    j["model"] = model;
    j["fold"] = fold;
    j["test_hash"] = test_hash;
    j["train_size"] = train_size;
    j["test_size"] = test_size;
    j["metrics"] = metrics.to_json();
    return j;
  }

  static EvalRecord from_json(const nlohmann::json& j) {
    EvalRecord r;
    r.method = j.at("method").get<std::string>();
    r.factor = j.at("factor").get<int>();
    r.model = j.at("model").get<std::string>();
    r.fold = j.at("fold").get<int>();
    r.test_hash = j.at("test_hash").get<std::string>();
    r.train_size = j.value("train_size", std::size_t{0});
    r.test_size = j.value("test_size", std::size_t{0});
    r.metrics = Metrics::from_json(j.at("metrics"));
    return r;
  }
};

inline std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content_hash(data);
}

// The test file is opened only after the model is trained.
inline EvalRecord evaluate_files(const std::filesystem::path& train_path, const std::filesystem::path& test_path,
                                 const TrainHyper& hyper, AccessLog* log = nullptr) {
  auto note = [&](std::string e) {
    if (log) log->note(std::move(e));
  };
  note("read:train");
  const auto train_corpus = load_corpus(train_path, /*drop_ham=*/true);
  note("train:begin");
  const auto model = train(train_corpus, hyper);
  note("train:end");
  note("read:test");
  EvalRecord rec;
  rec.test_hash = file_hash(test_path);
  const auto test_corpus = load_corpus(test_path, /*drop_ham=*/true);
  rec.model = hyper.config.name;
  rec.train_size = train_corpus.size();
  rec.test_size = test_corpus.size();
  rec.metrics = evaluate(model, test_corpus);
  note("evaluate:end");
  return rec;
}

// ---------------------------------------------------------------------------
// Comparison report
// ---------------------------------------------------------------------------

struct ReportRow {
  std::string method;
  int factor = 1;
  std::string model;
  std::size_t folds = 0;
  double precision = 0, recall = 0, accuracy = 0, f1 = 0;
  std::optional<double> delta_f1;  // percentage points vs. the original baseline
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::size_t k = 0;
};

inline int method_rank(const std::string& m) {
  static const std::vector<std::string> order = {"original", "eda-sr",   "eda-ri",    "eda-rs",
                                                 "eda-rd",   "llm-plain", "llm-theory"};
  auto it = std::find(order.begin(), order.end(), m);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

// Averages each (method, factor, model) group over its folds; every group must
// cover the same folds, and a fold must have the same test set everywhere.
inline EvalReport compare(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::Invalid, "no evaluation records to compare");
  std::map<int, std::string> fold_hash;
  for (const auto& r : records) {
    auto [it, inserted] = fold_hash.emplace(r.fold, r.test_hash);
    if (!inserted && it->second != r.test_hash) {
      throw Error(ErrorKind::Invalid, "mismatched folds: fold " + std::to_string(r.fold) +
                                          " has different test sets across runs");
    }
  }
  using Key = std::tuple<int, std::string, int, std::string>;
  std::map<Key, std::map<int, const EvalRecord*>> groups;
  for (const auto& r : records) {
    auto& g = groups[{method_rank(r.method), r.method, r.factor, r.model}];
    if (!g.emplace(r.fold, &r).second) {
      throw Error(ErrorKind::Invalid, "duplicate evaluation of " + r.method + " x" + std::to_string(r.factor) +
                                          " " + r.model + " fold " + std::to_string(r.fold));
    }
  }
  EvalReport report;
  report.k = fold_hash.size();
  for (const auto& [key, folds] : groups) {
    if (folds.size() != fold_hash.size()) {
      throw Error(ErrorKind::Invalid, "mismatched folds: " + std::get<1>(key) + " x" +
                                          std::to_string(std::get<2>(key)) + " " + std::get<3>(key) + " has " +
                                          std::to_string(folds.size()) + " of " +
                                          std::to_string(fold_hash.size()) + " folds");
    }
    ReportRow row{std::get<1>(key), std::get<2>(key), std::get<3>(key), folds.size(), 0, 0, 0, 0, std::nullopt};
    for (const auto& [_, r] : folds) {
      row.precision += r->metrics.precision;
      row.recall += r->metrics.recall;
      row.accuracy += r->metrics.accuracy;
      row.f1 += r->metrics.f1;
    }
    const double n = static_cast<double>(folds.size());
    row.precision /= n;
    row.recall /= n;
    row.accuracy /= n;
    row.f1 /= n;
    report.rows.push_back(row);
  }
  for (auto& row : report.rows) {
    for (const auto& base : report.rows) {
      if (base.method == "original" && base.model == row.model) row.delta_f1 = (row.f1 - base.f1) * 100.0;
    }
  }
  return report;
}

inline std::vector<EvalRecord> load_eval_records(const std::filesystem::path& run_dir) {
  const auto path = run_dir / "eval.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "missing " + path.string());
  try {
    auto j = nlohmann::json::parse(in);
    std::vector<EvalRecord> out;
    for (const auto& e : j.at("evaluations")) out.push_back(EvalRecord::from_json(e));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

inline EvalReport compare_run_dirs(const std::vector<std::filesystem::path>& dirs) {
  std::vector<EvalRecord> all;
  for (const auto& d : dirs) {
    auto recs = load_eval_records(d);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return compare(all);
}

// Signed percentage-point difference with one decimal, e.g. "+5.3".
inline std::string format_delta(double points) {
  const double r = std::round(points * 10.0) / 10.0;
  return (r >= 0 ? "+" : "") + text::fixed(r == 0.0 ? 0.0 : r, 1);
}

inline std::string pct(double v) { return text::fixed(v * 100.0, 1); }

inline std::string factor_title(int f) {
  switch (f) {
    case 2: return "2x (Twofold)";
    case 5: return "5x (Fivefold)";
    case 10: return "10x (Tenfold)";
  }
  return std::to_string(f) + "x";
}

// Text layout: the original baseline with P/R/Acc/F1, then one F1 block per
// factor (methods as columns, models as rows, delta vs. original in
// parentheses), then the full P/R/Acc/F1 listing.
inline void render_report_text(std::ostream& out, const EvalReport& report) {
  std::vector<std::string> models;
  std::set<int> factors;
  std::vector<std::string> methods;
  for (const auto& r : report.rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    if (r.method != "original") {
      factors.insert(r.factor);
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    }
  }
  std::sort(models.begin(), models.end());
  std::stable_sort(methods.begin(), methods.end(),
                   [](const auto& a, const auto& b) { return method_rank(a) < method_rank(b); });
  auto find = [&](const std::string& method, int factor, const std::string& model) -> const ReportRow* {
    for (const auto& r : report.rows) {
      if (r.method == method && r.factor == factor && r.model == model) return &r;
    }
    return nullptr;
  };
  char buf[512];
  out << "Mean over " << report.k << " folds (percent)\n\n";
  out << "Original\n";
  std::snprintf(buf, sizeof buf, "%-18s %7s %7s %7s %7s\n", "model", "P", "R", "Acc", "F1");
  out << buf;
  for (const auto& m : models) {
    if (const auto* r = find("original", 1, m)) {
      std::snprintf(buf, sizeof buf, "%-18s %7s %7s %7s %7s\n", m.c_str(), pct(r->precision).c_str(),
                    pct(r->recall).c_str(), pct(r->accuracy).c_str(), pct(r->f1).c_str());
      out << buf;
    }
  }
  for (int f : factors) {
    out << "\nF1 " << factor_title(f) << "\n";
    std::snprintf(buf, sizeof buf, "%-18s", "model");
    out << buf;
    for (const auto& meth : methods) {
      std::snprintf(buf, sizeof buf, " %16s", meth.c_str());
      out << buf;
    }
    out << "\n";
    for (const auto& m : models) {
      std::snprintf(buf, sizeof buf, "%-18s", m.c_str());
      out << buf;
      for (const auto& meth : methods) {
        std::string cell = "-";
        if (const auto* r = find(meth, f, m)) {
          cell = pct(r->f1);
          if (r->delta_f1) cell += " (" + format_delta(*r->delta_f1) + ")";
        }
        std::snprintf(buf, sizeof buf, " %16s", cell.c_str());
        out << buf;
      }
      out << "\n";
    }
  }
  out << "\nFull results\n";
  std::snprintf(buf, sizeof buf, "%-12s %6s %-18s %7s %7s %7s %7s %8s\n", "method", "factor", "model", "P", "R",
                "Acc", "F1", "dF1");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-12s %6d %-18s %7s %7s %7s %7s %8s\n", r.method.c_str(), r.factor,
                  r.model.c_str(), pct(r.precision).c_str(), pct(r.recall).c_str(), pct(r.accuracy).c_str(),
                  pct(r.f1).c_str(), r.delta_f1 ? format_delta(*r.delta_f1).c_str() : "");
    out << buf;
  }
}

inline void render_report_csv(std::ostream& out, const EvalReport& report) {
  csv::write_row(out, {"method", "factor", "model", "folds", "precision", "recall", "accuracy", "f1", "delta_f1"});
  for (const auto& r : report.rows) {
    csv::write_row(out, {r.method, std::to_string(r.factor), r.model, std::to_string(r.folds),
                         text::fixed(r.precision * 100, 2), text::fixed(r.recall * 100, 2),
                         text::fixed(r.accuracy * 100, 2), text::fixed(r.f1 * 100, 2),
                         r.delta_f1 ? text::fixed(*r.delta_f1, 2) : ""});
  }
}

}  // namespace smishaug::evalkit
