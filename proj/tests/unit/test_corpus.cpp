#include "nuc/corpus.hpp"
#include "nuc/error.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace nuc;
using fixtures::example;

namespace {

Corpus parse(const std::string& text) {
    std::istringstream in(text);
    return parse_jsonl(in);
}

}  // namespace

TEST(LoadJsonl, MinimalInput) {
    const Corpus c = parse(R"({"id":"a","text":"hi","label":"greet"}
{"id":"b","text":"yo"}
)");
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.label_space(), std::vector<std::string>{"greet"});
    EXPECT_EQ(c[0].id, "a");
    EXPECT_EQ(*c[0].gold_label, "greet");
    EXPECT_FALSE(c[1].gold_label);
    EXPECT_FALSE(c.dimension());
}

TEST(LoadJsonl, EmptyInput) {
    const Corpus c = parse("");
    EXPECT_EQ(c.size(), 0u);
    EXPECT_FALSE(c.dimension());
}

TEST(LoadJsonl, InferredLabelSpaceIsSorted) {
    const Corpus c = parse(R"({"id":"1","text":"x","label":"zeta"}
{"id":"2","text":"x","label":"alpha"}
{"id":"3","text":"x","label":"mid"}
{"id":"4","text":"x","label":"alpha"}
)");
    EXPECT_EQ(c.label_space(), (std::vector<std::string>{"alpha", "mid", "zeta"}));
}

TEST(LoadJsonl, DuplicateIdNamesLine2) {
    try {
        parse("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(LoadJsonl, MalformedJsonNamesLine) {
    try {
        parse("{\"id\":\"a\",\"text\":\"x\"}\n\n{\"id\": oops}\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadJsonl, DimensionMismatchIsValidationError) {
    EXPECT_THROW(parse(R"({"id":"a","text":"x","embedding":[1,2]}
{"id":"b","text":"y","embedding":[1,2,3]}
)"),
                 ValidationError);
}

TEST(LoadJsonl, LabelOutsideGivenSpaceRejected) {
    std::istringstream in(R"({"id":"a","text":"x","label":"other"})");
    EXPECT_THROW(parse_jsonl(in, std::vector<std::string>{"one", "two"}), ValidationError);
}

TEST(LoadJsonl, MissingTextRejected) {
    EXPECT_THROW(parse(R"({"id":"a"})"), ValidationError);
    EXPECT_THROW(parse(R"({"id":"a","text":""})"), ValidationError);
}

TEST(LoadJsonl, MissingFileIsIoError) {
    EXPECT_THROW(load_jsonl("/nonexistent/dir/data.jsonl"), IoError);
}

TEST(LoadJsonl, OodSentinelStaysOutOfLabelSpace) {
    const Corpus c = parse(R"({"id":"a","text":"x","label":"__ood__"}
{"id":"b","text":"x","label":"real"}
)");
    EXPECT_EQ(c.label_space(), std::vector<std::string>{"real"});
    EXPECT_THROW(Corpus({example("a", "x", {})}, {std::string(kOodLabel)}), ValidationError);
}

TEST(SaveJsonl, RoundTripsAtJsonValueLevel) {
    const std::string text = R"({"id":"a","text":"hello \"world\"\nline","label":"greet","embedding":[0.1,-2.5,3e-08]}
{"id":"b","text":"ünïcode","embedding":[1,0,0.33333334]}
{"id":"c","text":"plain"}
)";
    const Corpus c = parse(text);
    std::ostringstream out;
    write_jsonl(out, c);
    const Corpus again = parse(out.str());
    std::istringstream a(text), b(out.str());
    std::string la, lb;
    while (std::getline(a, la)) {
        ASSERT_TRUE(std::getline(b, lb));
        EXPECT_EQ(nlohmann::json::parse(la), nlohmann::json::parse(lb));
    }
    std::ostringstream out2;
    write_jsonl(out2, again);
    EXPECT_EQ(out.str(), out2.str());
}

TEST(SaveJsonl, FileRoundTrip) {
    fixtures::TempDir dir;
    const Corpus c({example("x", "l1", {1.0f, 2.0f}), example("y", std::nullopt, {0.5f, -0.25f})});
    save_jsonl(dir / "c.jsonl", c);
    const Corpus back = load_jsonl(dir / "c.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(*back[0].embedding, *c[0].embedding);
    EXPECT_EQ(*back[1].embedding, *c[1].embedding);
}

TEST(Normalize, HandComputed) {
    const Corpus c = normalize(Corpus({example("a", std::nullopt, {3.0f, 4.0f})}));
    EXPECT_FLOAT_EQ((*c[0].embedding)[0], 0.6f);
    EXPECT_FLOAT_EQ((*c[0].embedding)[1], 0.8f);
}

TEST(Normalize, UnitVectorUnchanged) {
    const Corpus c = normalize(Corpus({example("a", std::nullopt, {1.0f, 0.0f})}));
    EXPECT_EQ((*c[0].embedding)[0], 1.0f);
    EXPECT_EQ((*c[0].embedding)[1], 0.0f);
}

TEST(Normalize, ZeroVectorNamesId) {
    try {
        normalize(Corpus({example("ok", std::nullopt, {1.0f, 0.0f}), example("bad-one", std::nullopt, {0.0f, 0.0f})}));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("bad-one"), std::string::npos);
    }
}

TEST(Normalize, MissingEmbeddingRejected) {
    EXPECT_THROW(normalize(Corpus({example("a", std::nullopt, {})})), ValidationError);
}

TEST(NormalizeProperty, Idempotent) {
    std::mt19937_64 rng(3);
    std::vector<Example> xs;
    for (int i = 0; i < 300; ++i) {
        Example e = example("e" + std::to_string(i), std::nullopt, {});
        std::uniform_real_distribution<float> scale(1e-3f, 1e3f);
        e.embedding = fixtures::random_embedding(16, rng) * scale(rng);
        xs.push_back(e);
    }
    const Corpus once = normalize(Corpus(xs));
    const Corpus twice = normalize(once);
    for (std::size_t i = 0; i < once.size(); ++i) {
        EXPECT_NEAR(static_cast<double>(once[i].embedding->norm()), 1.0, 1e-6);
        for (Eigen::Index d = 0; d < 16; ++d)
            ASSERT_NEAR((*once[i].embedding)[d], (*twice[i].embedding)[d], 1e-12);
    }
}

TEST(CorpusProperty, EveryGoldLabelInLabelSpace) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> lab(0, 6);
    std::vector<Example> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(example("e" + std::to_string(i), "l" + std::to_string(lab(rng)), {}));
    const Corpus c(xs);
    for (const auto& e : c) EXPECT_TRUE(c.has_label(*e.gold_label));
}

TEST(Split, DeterministicAndDisjoint) {
    std::vector<Example> xs;
    for (int i = 0; i < 50; ++i) xs.push_back(example("e" + std::to_string(i), i % 2 ? "odd" : "even", {}));
    const Corpus c(xs);
    const Split a = split_test_pool(c, 10, 9);
    const Split b = split_test_pool(c, 10, 9);
    const Split other = split_test_pool(c, 10, 10);
    ASSERT_EQ(a.test.size(), 10u);
    ASSERT_EQ(a.pool.size(), 40u);
    bool differs = false;
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(a.test[i].id, b.test[i].id);
        differs |= a.test[i].id != other.test[i].id;
        EXPECT_FALSE(a.pool.find(a.test[i].id));
    }
    EXPECT_TRUE(differs);
    EXPECT_EQ(a.test.label_space(), c.label_space());
}
