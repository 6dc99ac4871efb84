#pragma once

#include "nuc/corpus.hpp"
#include "nuc/predictor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nuc {

struct PurityReport {
    std::size_t k = 0;
    bool include_self = false;
    double purity = 0.0;
    std::vector<std::pair<std::string, double>> per_anchor;
};

/// Fraction of each anchor's k nearest neighbors that share its gold label,
/// averaged over all anchors. The anchor is excluded from its own neighborhood
/// unless `include_self`, in which case it takes the first of the k slots.
PurityReport neighborhood_purity(const Corpus& labeled, std::size_t k, bool include_self = false);

/// Accuracy of predicting each anchor's gold label by voting over its k nearest
/// neighbors' gold labels: plain counts, or similarity-weighted when `weighted`.
/// Ties follow the aggregation module's rule.
double gt_majority_accuracy(const Corpus& labeled, std::size_t k, bool weighted, bool include_self = false);

/// Mean over examples of 1 - (modal prediction count) / n_reruns, using draws
/// 0..n_reruns-1 of the zero-shot prompt. Invalid predictions form their own
/// category.
double inconsistency_ratio(std::span<const Example> examples, std::size_t n_reruns, Predictor& predictor,
                           const std::vector<std::string>& label_space, std::size_t parallelism = 1);

/// Replaces a seeded random floor(ratio * N) subset of `pool` with examples
/// from `ood_source`. Replacements get id "ood:<source id>" and the reserved
/// OOD gold label. Size and label space are preserved.
Corpus inject_ood(const Corpus& pool, const Corpus& ood_source, double ratio, std::uint64_t seed);

}  // namespace nuc
