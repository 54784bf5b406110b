#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "mock_llm.hpp"

using namespace smishaug;

namespace {

struct Slice {
  Corpus train;
  FoldPlan fold;
};

Slice fold0(const Corpus& c, int k = 5) {
  auto folds = make_folds(c, k, 13);
  return {c.subset(folds[0].train_ids), folds[0]};
}

GatewayConfig mock_config() {
  GatewayConfig g;
  g.endpoint_url = "http://mock.invalid";
  g.max_inflight = 4;
  return g;
}

AugmentationResult run_llm(const Slice& s, Method m, int factor, std::size_t workers,
                           testkit::MockLlm::Options o = {}, int cap = 20) {
  testkit::MockLlm mock(7, o);
  LlmGateway gw(mock_config(), {Transport::Live, {}}, mock.poster(), [](auto) {});
  auto plan = make_plan(s.train, m, factor, s.fold, 13);
  plan.attempt_cap_multiplier = cap;
  LlmRunOptions opt;
  opt.model = "gpt-4o";
  opt.workers = workers;
  return run_llm_augmentation(plan, s.train, PromptTemplateSet::defaults(), gw, Validator{}, opt);
}

}  // namespace

TEST(Apportion, SumsAndLargestRemainder) {
  EXPECT_EQ(apportion(10, {1, 1, 1}), (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_EQ(apportion(7, {2, 5}), (std::vector<std::size_t>{2, 5}));
  EXPECT_EQ(apportion(0, {3, 4}), (std::vector<std::size_t>{0, 0}));
  EXPECT_THROW(apportion(5, {0, 0}), Error);
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::size_t> w(1 + rng.below(6));
    for (auto& x : w) x = rng.below(50);
    w[0] += 1;
    const auto total = rng.below(5000);
    auto out = apportion(total, w);
    std::size_t s = 0, ws = 0;
    for (auto x : out) s += x;
    for (auto x : w) ws += x;
    ASSERT_EQ(s, total);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double exact = static_cast<double>(total) * w[i] / ws;
      ASSERT_LT(std::abs(static_cast<double>(out[i]) - exact), 1.0);
    }
  }
}

TEST(Quotas, FollowLabelAndPrincipleDistributions) {
  auto s = fold0(testkit::generated_corpus(638, 489));
  ASSERT_EQ(s.train.size(), 901u);
  for (int factor : {2, 5, 10}) {
    auto q = plan_quotas(s.train, factor, Method::LlmTheory);
    EXPECT_EQ(quota_total(q), static_cast<std::size_t>(factor - 1) * 901);
    auto plain = plan_quotas(s.train, factor, Method::LlmPlain);
    EXPECT_EQ(plain.size(), 2u);
    EXPECT_EQ(quota_total(plain), quota_total(q));
    std::size_t smish = 0;
    for (const auto& [k, v] : q) {
      if (k.label == Label::Smishing) {
        ASSERT_TRUE(k.principle);
        smish += v;
      } else {
        EXPECT_FALSE(k.principle);
      }
    }
    EXPECT_EQ(smish, (plain.at({Label::Smishing, std::nullopt})));
  }
  EXPECT_THROW(plan_quotas(s.train, 1, Method::EdaSR), Error);
}

TEST(Quotas, TheoryNeedsAnnotations) {
  auto c = testkit::generated_corpus(10, 10);
  for (auto& m : c.messages) m.principle.reset();
  EXPECT_THROW(plan_quotas(c, 2, Method::LlmTheory), Error);
  EXPECT_NO_THROW(plan_quotas(c, 2, Method::LlmPlain));
}

TEST(EdaPipeline, ExactSizesAndProvenance) {
  auto s = fold0(testkit::generated_corpus(638, 489));
  for (int factor : {2, 5, 10}) {
    auto plan = make_plan(s.train, Method::EdaSR, factor, s.fold, 13);
    auto r = run_eda_augmentation(plan, s.train, eda::SynonymLexicon::builtin(), eda::EdaParams{});
    ASSERT_EQ(r.corpus.size(), static_cast<std::size_t>(factor) * 901);
    auto idx = s.train.index();
    for (std::size_t i = 901; i < r.corpus.size(); ++i) {
      const auto& m = r.corpus.messages[i];
      ASSERT_EQ(m.source, Source::EdaSR);
      ASSERT_TRUE(m.parent_id);
      const auto& parent = s.train.messages[idx.at(*m.parent_id)];
      ASSERT_EQ(m.label, parent.label);
      ASSERT_EQ(m.principle, parent.principle);
    }
    EXPECT_NO_THROW(validate_corpus(r.corpus));
  }
}

TEST(EdaPipeline, EveryTechniqueIsDeterministic) {
  auto s = fold0(testkit::annotated_synthetic_corpus());
  for (auto m : {Method::EdaSR, Method::EdaRI, Method::EdaRS, Method::EdaRD}) {
    auto plan = make_plan(s.train, m, 5, s.fold, 21);
    auto a = run_eda_augmentation(plan, s.train, eda::SynonymLexicon::builtin(), eda::EdaParams{});
    auto b = run_eda_augmentation(plan, s.train, eda::SynonymLexicon::builtin(), eda::EdaParams{});
    EXPECT_EQ(to_jsonl(a.corpus), to_jsonl(b.corpus)) << method_name(m);
    EXPECT_EQ(a.corpus.size(), 5 * s.train.size());
  }
}

TEST(EdaPipeline, RejectsMismatchedSlice) {
  auto c = testkit::annotated_synthetic_corpus();
  auto s = fold0(c);
  auto plan = make_plan(s.train, Method::EdaRS, 2, s.fold, 1);
  Corpus wrong = c.subset(s.fold.test_ids);
  EXPECT_THROW(run_eda_augmentation(plan, wrong, eda::SynonymLexicon::builtin(), eda::EdaParams{}), Error);
}

TEST(LlmPipeline, FillsQuotasWithValidUniqueMessages) {
  auto s = fold0(testkit::generated_corpus(120, 80));
  auto r = run_llm(s, Method::LlmTheory, 5, 1);
  ASSERT_TRUE(r.ok()) << r.manifest.to_json().dump();
  EXPECT_EQ(r.corpus.size(), 5 * s.train.size());
  Validator v;
  std::set<std::string> seen;
  std::map<BucketKey, std::size_t> per;
  for (std::size_t i = 0; i < r.corpus.size(); ++i) {
    const auto& m = r.corpus.messages[i];
    ASSERT_TRUE(seen.insert(text::normalize(m.text)).second) << m.text;
    if (i < s.train.size()) continue;
    ASSERT_TRUE(v.validate(m.text, m.label).accepted) << m.text;
    ASSERT_TRUE(m.prompt_id);
    per[{m.label, m.principle}] += 1;
  }
  EXPECT_EQ(per, r.manifest.plan.quotas);
  EXPECT_GT(r.manifest.rejected.at(RejectReason::Placeholder), 0u);
  EXPECT_FALSE(r.prompt_log.empty());
  std::set<std::string> logged;
  for (const auto& p : r.prompt_log) logged.insert(p.at("prompt_id").get<std::string>());
  for (std::size_t i = s.train.size(); i < r.corpus.size(); ++i) EXPECT_TRUE(logged.count(*r.corpus.messages[i].prompt_id));
}

TEST(LlmPipeline, OutputIndependentOfWorkerCount) {
  auto s = fold0(testkit::generated_corpus(120, 80));
  auto one = run_llm(s, Method::LlmTheory, 3, 1);
  auto four = run_llm(s, Method::LlmTheory, 3, 4);
  EXPECT_EQ(to_jsonl(one.corpus), to_jsonl(four.corpus));
  EXPECT_EQ(one.rejections.size(), four.rejections.size());
}

TEST(LlmPipeline, PlainSpamGetsNoPrinciple) {
  auto s = fold0(testkit::generated_corpus(60, 40));
  auto r = run_llm(s, Method::LlmPlain, 2, 2);
  ASSERT_TRUE(r.ok());
  for (std::size_t i = s.train.size(); i < r.corpus.size(); ++i) {
    EXPECT_FALSE(r.corpus.messages[i].principle);
    EXPECT_EQ(r.corpus.messages[i].source, Source::LlmPlain);
  }
}

TEST(LlmPipeline, RefusingModelHitsAttemptCap) {
  auto s = fold0(testkit::generated_corpus(30, 20));
  testkit::MockLlm::Options o;
  o.refusal_rate = 1.0;
  auto r = run_llm(s, Method::LlmPlain, 2, 1, o, 2);
  EXPECT_EQ(r.manifest.status, RunStatus::AttemptCap);
  for (const auto& b : r.manifest.buckets) {
    EXPECT_EQ(b.status, RunStatus::AttemptCap);
    EXPECT_EQ(b.requests, 2 * ((b.quota + 9) / 10));
  }
}

TEST(LlmPipeline, ReplayReproducesLiveRun) {
  testkit::TempDir dir;
  auto s = fold0(testkit::generated_corpus(60, 40));
  auto plan = make_plan(s.train, Method::LlmTheory, 3, s.fold, 13);
  LlmRunOptions opt;
  opt.model = "gpt-4o";
  testkit::MockLlm mock(7);
  AugmentationResult live;
  {
    LlmGateway rec(mock_config(), {Transport::Record, dir / "fx.jsonl"}, mock.poster(), [](auto) {});
    live = run_llm_augmentation(plan, s.train, PromptTemplateSet::defaults(), rec, Validator{}, opt);
  }
  LlmGateway rep(GatewayConfig{}, {Transport::Replay, dir / "fx.jsonl"});
  opt.workers = 3;
  auto replayed = run_llm_augmentation(plan, s.train, PromptTemplateSet::defaults(), rep, Validator{}, opt);
  EXPECT_EQ(to_jsonl(live.corpus), to_jsonl(replayed.corpus));
  EXPECT_EQ(mock.calls(), rep.stats().replayed);

  write_run(dir / "run", replayed);
  for (const auto* f : {"augmented.jsonl", "manifest.json", "rejections.jsonl", "prompts.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "run" / f)) << f;
  }
  EXPECT_EQ(load_corpus(dir / "run" / "augmented.jsonl", false).size(), replayed.corpus.size());
}

TEST(LlmPipeline, CancelFlagStopsRun) {
  auto s = fold0(testkit::generated_corpus(60, 40));
  testkit::MockLlm mock(7);
  LlmGateway gw(mock_config(), {Transport::Live, {}}, mock.poster(), [](auto) {});
  std::atomic<bool> cancel{true};
  LlmRunOptions opt;
  opt.model = "gpt-4o";
  opt.cancel = &cancel;
  auto plan = make_plan(s.train, Method::LlmPlain, 2, s.fold, 1);
  auto r = run_llm_augmentation(plan, s.train, PromptTemplateSet::defaults(), gw, Validator{}, opt);
  EXPECT_EQ(r.manifest.status, RunStatus::Interrupted);
  EXPECT_EQ(mock.calls(), 0u);
}
