#include "nuc/analysis.hpp"

#include "nuc/aggregation.hpp"
#include "nuc/error.hpp"
#include "nuc/parallel.hpp"
#include "nuc/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace nuc {

namespace {

void require_labeled_embedded(const Corpus& c) {
    for (const auto& ex : c) {
        if (!ex.gold_label) throw ValidationError("example '" + ex.id + "' has no gold label");
        if (!ex.embedding) throw ValidationError("example '" + ex.id + "' has no embedding");
    }
}

Neighborhood neighbors_of(const EmbeddingIndex& index, const Corpus& c, std::size_t i, std::size_t k,
                          bool include_self) {
    if (include_self) return index.search(c[i].id, *c[i].embedding, k, {.include_anchor = true, .exclude = i});
    return index.search(c[i].id, *c[i].embedding, k, {.include_anchor = false, .exclude = i});
}

void check_k(const Corpus& c, std::size_t k, bool include_self) {
    if (k == 0) throw ValidationError("k must be positive");
    const bool ok = include_self ? k <= c.size() : k < c.size();
    if (!ok)
        throw ValidationError("k = " + std::to_string(k) + " is too large for a corpus of " + std::to_string(c.size()));
}

}  // namespace

PurityReport neighborhood_purity(const Corpus& labeled, std::size_t k, bool include_self) {
    require_labeled_embedded(labeled);
    check_k(labeled, k, include_self);
    const EmbeddingIndex index(labeled);

    PurityReport report;
    report.k = k;
    report.include_self = include_self;
    report.per_anchor.reserve(labeled.size());
    double total = 0.0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const Neighborhood nh = neighbors_of(index, labeled, i, k, include_self);
        std::size_t same = 0;
        for (std::size_t idx : nh.indices) {
            const std::size_t j = idx == kAnchorSlot ? i : idx;
            if (*labeled[j].gold_label == *labeled[i].gold_label) ++same;
        }
        const double p = static_cast<double>(same) / static_cast<double>(k);
        report.per_anchor.emplace_back(labeled[i].id, p);
        total += p;
    }
    report.purity = total / static_cast<double>(labeled.size());
    return report;
}

double gt_majority_accuracy(const Corpus& labeled, std::size_t k, bool weighted, bool include_self) {
    require_labeled_embedded(labeled);
    check_k(labeled, k, include_self);
    const EmbeddingIndex index(labeled);
    const AggregationPolicy policy{.kind = weighted ? PolicyKind::weighted_distance : PolicyKind::naive};

    std::size_t correct = 0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const Neighborhood nh = neighbors_of(index, labeled, i, k, include_self);
        std::vector<Vote> votes;
        votes.reserve(nh.size());
        for (std::size_t r = 0; r < nh.size(); ++r) {
            const std::size_t j = nh.indices[r] == kAnchorSlot ? i : nh.indices[r];
            votes.push_back({.label = *labeled[j].gold_label, .weight = std::max(0.0, nh.similarities[r])});
        }
        const VoteOutcome out = aggregate(votes, policy, Vote{.label = {}});
        if (out.label == *labeled[i].gold_label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(labeled.size());
}

double inconsistency_ratio(std::span<const Example> examples, std::size_t n_reruns, Predictor& predictor,
                           const std::vector<std::string>& label_space, std::size_t parallelism) {
    if (n_reruns < 2) throw ValidationError("inconsistency needs at least 2 reruns");
    if (examples.empty()) throw ValidationError("no examples");
    std::vector<double> per_example(examples.size());
    parallel_for(examples.size(), parallelism, [&](std::size_t i) {
        std::map<std::string, std::size_t> counts;
        for (std::size_t d = 0; d < n_reruns; ++d) {
            const Prediction p = predictor.predict(examples[i], label_space, static_cast<std::uint32_t>(d));
            ++counts[p.valid ? p.label : std::string()];
        }
        std::size_t modal = 0;
        for (const auto& [label, n] : counts) modal = std::max(modal, n);
        per_example[i] = 1.0 - static_cast<double>(modal) / static_cast<double>(n_reruns);
    });
    return std::accumulate(per_example.begin(), per_example.end(), 0.0) / static_cast<double>(examples.size());
}

Corpus inject_ood(const Corpus& pool, const Corpus& ood_source, double ratio, std::uint64_t seed) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw ValidationError("OOD ratio must be in [0, 1]");
    if (pool.dimension() && ood_source.dimension() && *pool.dimension() != *ood_source.dimension())
        throw ValidationError("OOD source dimension differs from the pool dimension");
    const auto n_replace = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(pool.size()) + 1e-9));
    if (n_replace > ood_source.size())
        throw ValidationError("OOD source has " + std::to_string(ood_source.size()) + " examples, " +
                              std::to_string(n_replace) + " needed");
    if (n_replace == 0) return pool;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> positions(pool.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::shuffle(positions.begin(), positions.end(), rng);
    std::vector<std::size_t> sources(ood_source.size());
    std::iota(sources.begin(), sources.end(), std::size_t{0});
    std::shuffle(sources.begin(), sources.end(), rng);

    std::vector<Example> out = pool.examples();
    for (std::size_t r = 0; r < n_replace; ++r) {
        Example e = ood_source[sources[r]];
        e.id = "ood:" + e.id;
        e.gold_label = std::string(kOodLabel);
        out[positions[r]] = std::move(e);
    }
    return Corpus(std::move(out), pool.label_space());
}

}  // namespace nuc
