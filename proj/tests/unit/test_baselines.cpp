#include "nuc/baselines.hpp"
#include "nuc/error.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

using namespace nuc;
using fixtures::example;
using Answer = fixtures::ScriptedBackend::Answer;

namespace {

const std::vector<std::string> kABC{"A", "B", "C"};

std::shared_ptr<fixtures::ScriptedBackend> by_draw(std::vector<Answer> answers) {
    return std::make_shared<fixtures::ScriptedBackend>(
        [answers](const Example&, std::uint32_t draw) { return answers.at(draw); });
}

std::vector<Answer> labels_only(std::initializer_list<const char*> ls) {
    std::vector<Answer> out;
    for (const char* l : ls) out.push_back({l, 0.9});
    return out;
}

}  // namespace

TEST(SelfConsistency, ModalLabelAndFraction) {
    auto backend = by_draw(labels_only({"A", "A", "A", "B", "B", "C", "A", "B", "A", "C"}));
    Predictor pred(backend, {});
    const Prediction p = self_consistency(example("e", "A", {}), 10, pred, kABC);
    EXPECT_EQ(p.label, "A");
    EXPECT_DOUBLE_EQ(p.confidence, 0.5);
    EXPECT_EQ(backend->calls, 10);
}

TEST(SelfConsistency, SingleDrawUnchanged) {
    Predictor pred(by_draw({{"B", 0.33}}), {});
    const Prediction p = self_consistency(example("e", "A", {}), 1, pred, kABC);
    EXPECT_EQ(p.label, "B");
    EXPECT_DOUBLE_EQ(p.confidence, 0.33);
}

TEST(SelfConsistency, InvalidDrawsDoNotVote) {
    Predictor pred(by_draw(labels_only({"", "", "", "B"})), {});
    const Prediction p = self_consistency(example("e", "A", {}), 4, pred, kABC);
    EXPECT_EQ(p.label, "B");
    EXPECT_DOUBLE_EQ(p.confidence, 0.25);
}

TEST(BestOfN, HighestConfidenceEarliestOnTie) {
    Predictor pred(by_draw({{"A", 0.4}, {"C", 0.8}, {"B", 0.8}}), {});
    EXPECT_EQ(best_of_n(example("e", "A", {}), 3, pred, kABC, false).label, "C");
}

TEST(BestOfN, WeightedSumsConfidence) {
    Predictor pred(by_draw({{"A", 0.4}, {"A", 0.4}, {"B", 0.7}}), {});
    const Prediction w = best_of_n(example("e", "A", {}), 3, pred, kABC, true);
    EXPECT_EQ(w.label, "A");
    EXPECT_NEAR(w.confidence, 0.8 / 1.5, 1e-12);
    EXPECT_EQ(best_of_n(example("e", "A", {}), 3, pred, kABC, false).label, "B");
}

TEST(BaseKind, NamesAndAliases) {
    for (auto k : {BaseKind::standard, BaseKind::self_consistency, BaseKind::best_of_n, BaseKind::weighted_best_of_n,
                   BaseKind::knn_icl, BaseKind::knn_icl_p})
        EXPECT_EQ(parse_base_kind(to_string(k)), k);
    EXPECT_EQ(parse_base_kind("topk_icl"), BaseKind::knn_icl);
    EXPECT_THROW(parse_base_kind("cot"), ValidationError);
}

TEST(BaseKind, CallsPerItem) {
    EXPECT_EQ((BasePredictorSpec{.kind = BaseKind::standard}.calls_per_item()), 1u);
    EXPECT_EQ((BasePredictorSpec{.kind = BaseKind::self_consistency, .n_samples = 7}.calls_per_item()), 7u);
    EXPECT_EQ((BasePredictorSpec{.kind = BaseKind::knn_icl, .k_demos = 4}.calls_per_item()), 1u);
    EXPECT_EQ((BasePredictorSpec{.kind = BaseKind::knn_icl_p, .k_demos = 4}.calls_per_item()), 5u);
    EXPECT_THROW((BasePredictorSpec{.n_samples = 0}.validate()), ValidationError);
}

TEST(KnnIcl, PromptRendersNearestLast) {
    const std::vector<IclDemo> demos{{"nearest", Prediction{.label = "A", .confidence = 0.9}},
                                     {"middle", Prediction::invalid("?", PredictionSource::remote)},
                                     {"farthest", Prediction{.label = "B", .confidence = 0.9}}};
    const std::string p = knn_icl_prompt(example("q", "A", {}, "query"), demos, true, kABC);
    const std::vector<Demonstration> expected{{"farthest", "B"}, {"middle", std::nullopt}, {"nearest", "A"}};
    EXPECT_EQ(p, build_demonstration_prompt("query", expected, kABC));
    const std::string bare = knn_icl_prompt(example("q", "A", {}, "query"), demos, false, kABC);
    EXPECT_EQ(bare, build_demonstration_prompt("query", {{"farthest", {}}, {"middle", {}}, {"nearest", {}}}, kABC));
}

TEST(KnnIcl, MissingPseudoLabelRejected) {
    const std::vector<IclDemo> demos{{"x", std::nullopt}};
    EXPECT_THROW(knn_icl_prompt(example("q", "A", {}), demos, true, kABC), ValidationError);
}

TEST(KnnIcl, NeedsPool) {
    Predictor pred(fixtures::always("A"), {});
    EXPECT_THROW(BasePredictor({.kind = BaseKind::knn_icl}, pred, kABC), ValidationError);
}

TEST(KnnIcl, RetrievesDemosExcludingSelf) {
    const auto data = fixtures::clustered(4, 3, kABC);
    const EmbeddingIndex index(data.pool);
    auto backend = fixtures::gold_backend();
    Predictor pred(backend, {});
    BasePredictor icl({.kind = BaseKind::knn_icl, .k_demos = 2}, pred, kABC, PoolView{data.pool, index});
    icl.predict(data.pool[0], 0);
    ASSERT_EQ(backend->prompts.size(), 1u);
    const std::string& prompt = backend->prompts[0];
    EXPECT_EQ(prompt.find("1. Text: " + data.pool[0].text), std::string::npos);
    EXPECT_NE(prompt.find(data.pool[1].text), std::string::npos);
    EXPECT_NE(prompt.find(data.pool[2].text), std::string::npos);
}

TEST(KnnIclP, PseudoLabelsComputedOncePerPoolMember) {
    const auto data = fixtures::clustered(5, 4, kABC);
    const EmbeddingIndex index(data.pool);
    auto backend = fixtures::gold_backend();
    Predictor pred(backend, {});  // no cache: only the memo prevents repeats
    BasePredictor icl({.kind = BaseKind::knn_icl_p, .k_demos = 4}, pred, kABC, PoolView{data.pool, index});
    for (std::size_t i = 0; i < data.test.size(); ++i) icl.predict(data.test[i]);
    // cold: k_demos pseudo-labels + 1 final call each
    EXPECT_EQ(backend->calls, static_cast<int>(data.test.size() * 5));
    for (std::size_t i = 0; i < data.test.size(); ++i) icl.predict(data.test[i]);
    EXPECT_EQ(backend->calls, static_cast<int>(data.test.size() * 6));
    const std::string& last = backend->prompts.back();
    EXPECT_NE(last.find("Label: "), std::string::npos);
}
