#include "nuc/simulated_oracle.hpp"

#include "nuc/error.hpp"

#include <algorithm>
#include <charconv>
#include <random>

namespace nuc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::mt19937_64 stream_for(std::string_view id, std::uint32_t draw, std::uint64_t seed) {
    const std::uint64_t key = splitmix64(splitmix64(fnv1a(id) ^ splitmix64(seed)) ^ draw);
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32), draw};
    return std::mt19937_64(seq);
}

double sample_beta(std::mt19937_64& rng, BetaParams p) {
    std::gamma_distribution<double> ga(p.alpha, 1.0);
    std::gamma_distribution<double> gb(p.beta, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x + y > 0.0 ? x / (x + y) : 0.5;
}

std::string format_raw(const std::string& label, double confidence) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), confidence);
    (void)ec;
    return "Label: " + label + ", Confidence: " + std::string(buf, end);
}

Prediction sample(const Example& ex, const OracleParams& params, std::mt19937_64& rng,
                  const std::vector<std::string>& label_space) {
    const std::string& gold = *ex.gold_label;
    const bool gold_known = std::find(label_space.begin(), label_space.end(), gold) != label_space.end();
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::string label;
    if (gold_known) {
        const bool correct = unit(rng) < params.accuracy || label_space.size() == 1;
        if (correct) {
            label = gold;
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, label_space.size() - 2);
            std::size_t j = pick(rng);
            for (const auto& l : label_space) {
                if (l == gold) continue;
                if (j-- == 0) {
                    label = l;
                    break;
                }
            }
        }
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, label_space.size() - 1);
        label = label_space[pick(rng)];
    }
    const bool correct = label == gold;
    const double conf = sample_beta(rng, correct ? params.correct_confidence : params.incorrect_confidence);
    return {.label = label, .confidence = conf, .raw = format_raw(label, conf), .source = PredictionSource::simulated};
}

}  // namespace

void OracleParams::validate() const {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ValidationError("oracle accuracy must be in [0, 1]");
    if (!(consistency >= 0.0 && consistency <= 1.0)) throw ValidationError("oracle consistency must be in [0, 1]");
    for (auto p : {correct_confidence, incorrect_confidence})
        if (!(p.alpha > 0.0 && p.beta > 0.0)) throw ValidationError("beta parameters must be positive");
}

Prediction simulated_oracle(const Example& example, const OracleParams& params, std::uint32_t draw,
                            std::uint64_t seed, const std::vector<std::string>& label_space) {
    if (!example.gold_label)
        throw ValidationError("simulated oracle needs a gold label for example '" + example.id + "'");
    if (label_space.empty()) throw ValidationError("label space is empty");

    if (draw == 0) {
        auto rng = stream_for(example.id, 0, seed);
        return sample(example, params, rng, label_space);
    }
    auto rng = stream_for(example.id, draw, seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < params.consistency) return simulated_oracle(example, params, 0, seed, label_space);
    return sample(example, params, rng, label_space);
}

}  // namespace nuc
