#pragma once

#include "nuc/corpus.hpp"
#include "nuc/predictor.hpp"
#include "nuc/prompt.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline nuc::Example example(std::string id, std::optional<std::string> label, std::initializer_list<float> emb,
                            std::string text = {}) {
    nuc::Example e;
    e.id = id;
    e.text = text.empty() ? "text of " + id : text;
    e.gold_label = std::move(label);
    if (emb.size()) e.embedding = Eigen::Map<const Eigen::VectorXf>(emb.begin(), static_cast<Eigen::Index>(emb.size()));
    return e;
}

inline nuc::Embedding angle(double degrees) {
    const double r = degrees * 3.14159265358979323846 / 180.0;
    nuc::Embedding v(2);
    v << static_cast<float>(std::cos(r)), static_cast<float>(std::sin(r));
    return v;
}

inline nuc::Embedding random_embedding(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<float> n01(0.0f, 1.0f);
    nuc::Embedding v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n01(rng);
    return v;
}

// Answers from a script keyed on (example id, draw); counts calls.
class ScriptedBackend final : public nuc::Backend {
public:
    struct Answer {
        std::string label;
        double confidence = 0.9;
    };
    using Script = std::function<Answer(const nuc::Example&, std::uint32_t draw)>;

    explicit ScriptedBackend(Script script) : script_(std::move(script)) {}

    std::string identity(const nuc::PredictorConfig&) const override { return "scripted"; }
    nuc::BackendReply complete(const nuc::PredictRequest& r, const nuc::PredictorConfig&) override {
        ++calls;
        {
            std::lock_guard lock(mutex_);
            prompts.push_back(r.prompt);
        }
        const Answer a = script_(r.example, r.draw);
        nuc::Prediction p;
        p.label = a.label;
        p.confidence = a.confidence;
        p.valid = !a.label.empty();
        p.raw = "Label: " + a.label;
        return {p, 1};
    }

    std::atomic<int> calls{0};
    std::vector<std::string> prompts;

private:
    Script script_;
    std::mutex mutex_;
};

inline std::shared_ptr<ScriptedBackend> always(std::string label, double conf = 0.9) {
    return std::make_shared<ScriptedBackend>(
        [label, conf](const nuc::Example&, std::uint32_t) { return ScriptedBackend::Answer{label, conf}; });
}

// Gold label with the given confidence, for every example.
inline std::shared_ptr<ScriptedBackend> gold_backend(double conf = 0.9) {
    return std::make_shared<ScriptedBackend>([conf](const nuc::Example& e, std::uint32_t) {
        return ScriptedBackend::Answer{e.gold_label.value_or(""), conf};
    });
}

// n_clusters test anchors on orthogonal axes, each with `per_cluster` pool
// members tightly around it. Neighborhoods of size <= per_cluster + 1 are
// disjoint. Test and pool gold labels cycle through `labels`.
struct Clustered {
    nuc::Corpus test;
    nuc::Corpus pool;
};

inline Clustered clustered(std::size_t n_clusters, std::size_t per_cluster, const std::vector<std::string>& labels,
                           std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> jitter(0.0f, 0.05f);
    std::vector<nuc::Example> test, pool;
    const auto d = static_cast<Eigen::Index>(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        nuc::Example t = example("t" + std::to_string(c), labels[c % labels.size()], {});
        t.embedding = nuc::Embedding::Unit(d, static_cast<Eigen::Index>(c));
        test.push_back(t);
        for (std::size_t j = 0; j < per_cluster; ++j) {
            nuc::Example p = example("p" + std::to_string(c) + "_" + std::to_string(j),
                                     labels[(c + j) % labels.size()], {});
            nuc::Embedding e = nuc::Embedding::Unit(d, static_cast<Eigen::Index>(c));
            for (Eigen::Index k = 0; k < d; ++k)
                if (k != static_cast<Eigen::Index>(c)) e[k] = jitter(rng);
            p.embedding = e.normalized();
            pool.push_back(p);
        }
    }
    return {nuc::Corpus(test, labels), nuc::Corpus(pool, labels)};
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("nuc-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

}  // namespace fixtures
