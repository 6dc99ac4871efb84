#include "nuc/error.hpp"
#include "nuc/retrieval.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nuc;
using fixtures::example;

TEST(Cosine, HandValues) {
    const Eigen::Vector2f x(1, 0), y(0, 1), d(1, 1);
    EXPECT_DOUBLE_EQ(cosine_similarity(x, x), 1.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(x, y), 0.0);
    EXPECT_NEAR(cosine_similarity(x, d), 0.70710678, 1e-8);
    EXPECT_DOUBLE_EQ(cosine_similarity(d, x), cosine_similarity(x, d));
}

TEST(Cosine, Errors) {
    const Eigen::VectorXf x = Eigen::Vector2f(1, 0), z = Eigen::Vector2f(0, 0);
    const Eigen::VectorXf w = Eigen::Vector3f(1, 0, 0);
    EXPECT_THROW(cosine_similarity(x, w), ValidationError);
    EXPECT_THROW(cosine_similarity(x, z), ValidationError);
}

TEST(Cosine, WorksForDoubleVectors) {
    const Eigen::Vector3d a(1, 2, 3), b(-1, 0.5, 2);
    EXPECT_NEAR(cosine_similarity(a, b), (a.dot(b)) / (a.norm() * b.norm()), 1e-15);
}

namespace {

// Pool whose cosine similarities to (1, 0) are 0.9, 0.1, 0.5.
Corpus three_pool() {
    std::vector<Example> xs;
    for (double s : {0.9, 0.1, 0.5}) {
        const double a = std::acos(s) * 180.0 / 3.14159265358979323846;
        Example e = example("p" + std::to_string(xs.size()), std::nullopt, {});
        e.embedding = fixtures::angle(a);
        xs.push_back(e);
    }
    return Corpus(xs);
}

}  // namespace

TEST(TopK, PicksHighestInOrder) {
    const Example anchor = example("q", std::nullopt, {1.0f, 0.0f});
    const Neighborhood nh = top_k(anchor, three_pool(), 2, false);
    EXPECT_EQ(nh.indices, (std::vector<std::size_t>{0, 2}));
    EXPECT_NEAR(nh.similarities[0], 0.9, 1e-6);
    EXPECT_NEAR(nh.similarities[1], 0.5, 1e-6);
    EXPECT_EQ(nh.anchor_id, "q");
}

TEST(TopK, WholePoolSorted) {
    const Example anchor = example("q", std::nullopt, {1.0f, 0.0f});
    EXPECT_EQ(top_k(anchor, three_pool(), 3, false).indices, (std::vector<std::size_t>{0, 2, 1}));
}

TEST(TopK, AnchorAlone) {
    const Example anchor = example("q", std::nullopt, {1.0f, 0.0f});
    const Neighborhood nh = top_k(anchor, three_pool(), 1, true);
    ASSERT_EQ(nh.size(), 1u);
    EXPECT_TRUE(nh.includes_anchor());
    EXPECT_EQ(nh.similarities[0], 1.0);
}

TEST(TopK, AnchorTakesFirstSlot) {
    const Example anchor = example("q", std::nullopt, {1.0f, 0.0f});
    const Neighborhood nh = top_k(anchor, three_pool(), 4, true);
    EXPECT_EQ(nh.indices, (std::vector<std::size_t>{kAnchorSlot, 0, 2, 1}));
}

TEST(TopK, TooLargeKRejected) {
    const Example anchor = example("q", std::nullopt, {1.0f, 0.0f});
    EXPECT_THROW(top_k(anchor, three_pool(), 4, false), ValidationError);
    EXPECT_THROW(top_k(anchor, three_pool(), 5, true), ValidationError);
    EXPECT_THROW(top_k(anchor, three_pool(), 0, true), ValidationError);
}

TEST(TopK, TiesBrokenByIndex) {
    const Corpus pool({example("a", std::nullopt, {0.0f, 1.0f}), example("b", std::nullopt, {1.0f, 1.0f}),
                       example("c", std::nullopt, {2.0f, 2.0f}), example("d", std::nullopt, {1.0f, 1.0f})});
    const Example anchor = example("q", std::nullopt, {1.0f, 1.0f});
    EXPECT_EQ(top_k(anchor, pool, 4, false).indices, (std::vector<std::size_t>{1, 2, 3, 0}));
}

TEST(TopK, DimensionMismatchRejected) {
    const Example anchor = example("q", std::nullopt, {1.0f, 0.0f, 0.0f});
    EXPECT_THROW(top_k(anchor, three_pool(), 1, false), ValidationError);
}

TEST(TopK, ExcludeSkipsSelf) {
    const EmbeddingIndex index(three_pool());
    const Neighborhood nh = index.search("p0", fixtures::angle(std::acos(0.9) * 180.0 / 3.14159265358979323846), 2,
                                         {.include_anchor = false, .exclude = 0});
    EXPECT_EQ(nh.indices, (std::vector<std::size_t>{2, 1}));
}

TEST(RetrievalProperty, MatchesFullSortOracle) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> size(1, 120);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = size(rng);
        std::vector<std::vector<float>> raw;
        std::vector<Example> xs;
        for (int i = 0; i < n; ++i) {
            Embedding e = fixtures::random_embedding(16, rng);
            if (i > 0 && i % 7 == 0) e = *xs[static_cast<std::size_t>(i / 2)].embedding;  // duplicates make ties
            raw.emplace_back(e.data(), e.data() + e.size());
            Example ex = example("p" + std::to_string(i), std::nullopt, {});
            ex.embedding = e;
            xs.push_back(ex);
        }
        const Corpus pool(xs);
        const EmbeddingIndex index(pool);
        const Embedding q = trial % 3 == 0 ? *xs.front().embedding : fixtures::random_embedding(16, rng);
        const std::vector<float> qv(q.data(), q.data() + q.size());
        const auto ranking = oracle::full_ranking(raw, qv);
        for (std::size_t k : {1u, 5u, 20u}) {
            if (k > pool.size()) {
                EXPECT_THROW(index.search("q", q, k), ValidationError);
                continue;
            }
            const Neighborhood nh = index.search("q", q, k);
            ASSERT_EQ(nh.size(), k);
            for (std::size_t r = 0; r < k; ++r) {
                ASSERT_EQ(nh.indices[r], ranking[r].index) << "trial " << trial << " k " << k << " rank " << r;
                ASSERT_NEAR(nh.similarities[r], static_cast<double>(ranking[r].similarity), 1e-12);
            }
        }
    }
}

TEST(RetrievalProperty, MonotoneInK) {
    std::mt19937_64 rng(22);
    std::vector<Example> xs;
    for (int i = 0; i < 60; ++i) {
        Example ex = example("p" + std::to_string(i), std::nullopt, {});
        ex.embedding = fixtures::random_embedding(16, rng);
        xs.push_back(ex);
    }
    const EmbeddingIndex index{Corpus(xs)};
    for (int t = 0; t < 20; ++t) {
        const Embedding q = fixtures::random_embedding(16, rng);
        for (std::size_t k = 1; k < 60; ++k) {
            const Neighborhood a = index.search("q", q, k), b = index.search("q", q, k + 1);
            ASSERT_EQ(std::vector<double>(b.similarities.begin(), b.similarities.end() - 1), a.similarities);
            ASSERT_TRUE(std::is_sorted(b.similarities.rbegin(), b.similarities.rend()));
        }
    }
}

TEST(RetrievalProperty, ScaleInvariance) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<float> scale(0.01f, 100.0f);
    std::vector<Example> xs, scaled;
    for (int i = 0; i < 80; ++i) {
        Example ex = example("p" + std::to_string(i), std::nullopt, {});
        ex.embedding = fixtures::random_embedding(16, rng);
        xs.push_back(ex);
        ex.embedding = *ex.embedding * scale(rng);
        scaled.push_back(ex);
    }
    const EmbeddingIndex a{Corpus(xs)}, b{Corpus(scaled)};
    for (int t = 0; t < 30; ++t) {
        const Embedding q = fixtures::random_embedding(16, rng);
        const Neighborhood na = a.search("q", q, 10, {.include_anchor = true});
        const Neighborhood nb = b.search("q", q * scale(rng), 10, {.include_anchor = true});
        ASSERT_EQ(na.indices, nb.indices);
        for (std::size_t r = 0; r < 10; ++r) ASSERT_NEAR(na.similarities[r], nb.similarities[r], 1e-6);
    }
}
