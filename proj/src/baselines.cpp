#include "nuc/baselines.hpp"

#include "nuc/aggregation.hpp"
#include "nuc/error.hpp"
#include "nuc/prompt.hpp"

#include <algorithm>

namespace nuc {

std::string_view to_string(BaseKind kind) {
    switch (kind) {
        case BaseKind::standard: return "standard";
        case BaseKind::self_consistency: return "self_consistency";
        case BaseKind::best_of_n: return "best_of_n";
        case BaseKind::weighted_best_of_n: return "weighted_best_of_n";
        case BaseKind::knn_icl: return "knn_icl";
        case BaseKind::knn_icl_p: return "knn_icl_p";
    }
    return "unknown";
}

BaseKind parse_base_kind(std::string_view name) {
    if (name == "topk_icl") return BaseKind::knn_icl;
    if (name == "topk_icl_p") return BaseKind::knn_icl_p;
    for (auto k : {BaseKind::standard, BaseKind::self_consistency, BaseKind::best_of_n, BaseKind::weighted_best_of_n,
                   BaseKind::knn_icl, BaseKind::knn_icl_p})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown base predictor '" + std::string(name) +
                          "' (expected standard, self_consistency, best_of_n, weighted_best_of_n, knn_icl or "
                          "knn_icl_p)");
}

void BasePredictorSpec::validate() const {
    if (n_samples == 0) throw ValidationError("n_samples must be >= 1");
    if (uses_demonstrations() && k_demos == 0) throw ValidationError("k_demos must be >= 1");
}

std::size_t BasePredictorSpec::calls_per_item() const noexcept {
    switch (kind) {
        case BaseKind::standard:
        case BaseKind::knn_icl: return 1;
        case BaseKind::self_consistency:
        case BaseKind::best_of_n:
        case BaseKind::weighted_best_of_n: return n_samples;
        case BaseKind::knn_icl_p: return k_demos + 1;
    }
    return 1;
}

Prediction standard_predict(const Example& example, Predictor& predictor, const std::vector<std::string>& label_space) {
    return predictor.predict(example, label_space, 0);
}

namespace {

std::vector<Prediction> draws(const Example& example, std::size_t n, Predictor& predictor,
                              const std::vector<std::string>& label_space) {
    if (n == 0) throw ValidationError("number of samples must be >= 1");
    std::vector<Prediction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(predictor.predict(example, label_space, static_cast<std::uint32_t>(i)));
    return out;
}

const Prediction* first_valid(const std::vector<Prediction>& ps) {
    for (const auto& p : ps)
        if (p.valid) return &p;
    return nullptr;
}

}  // namespace

Prediction self_consistency(const Example& example, std::size_t n, Predictor& predictor,
                            const std::vector<std::string>& label_space) {
    auto ps = draws(example, n, predictor, label_space);
    if (n == 1) return ps.front();
    std::vector<Vote> votes;
    for (const auto& p : ps)
        if (p.valid) votes.push_back({.label = p.label});
    if (votes.empty()) return ps.front();

    const std::string label = naive_majority(votes);
    const auto modal = std::count_if(ps.begin(), ps.end(), [&](const Prediction& p) { return p.valid && p.label == label; });
    const auto it = std::find_if(ps.begin(), ps.end(), [&](const Prediction& p) { return p.valid && p.label == label; });
    Prediction out = *it;
    out.confidence = static_cast<double>(modal) / static_cast<double>(n);
    out.confidence_defaulted = false;
    return out;
}

Prediction best_of_n(const Example& example, std::size_t n, Predictor& predictor,
                     const std::vector<std::string>& label_space, bool weighted) {
    auto ps = draws(example, n, predictor, label_space);
    if (n == 1) return ps.front();
    const Prediction* first = first_valid(ps);
    if (!first) return ps.front();

    if (!weighted) {
        const Prediction* best = first;
        for (const auto& p : ps)
            if (p.valid && p.confidence > best->confidence) best = &p;
        return *best;
    }

    std::vector<Vote> votes;
    for (const auto& p : ps)
        if (p.valid) votes.push_back({.label = p.label, .weight = p.confidence});
    const VoteOutcome outcome =
        aggregate(votes, {.kind = PolicyKind::weighted_distance}, {.label = first->label, .confidence = first->confidence});
    const auto it = std::find_if(ps.begin(), ps.end(), [&](const Prediction& p) { return p.valid && p.label == outcome.label; });
    Prediction out = *it;
    out.confidence = outcome.confidence();
    out.confidence_defaulted = false;
    return out;
}

std::string knn_icl_prompt(const Example& example, std::span<const IclDemo> demos, bool with_pseudo_labels,
                           const std::vector<std::string>& label_space) {
    std::vector<Demonstration> rendered;
    rendered.reserve(demos.size());
    for (auto it = demos.rbegin(); it != demos.rend(); ++it) {
        Demonstration d{it->text, std::nullopt};
        if (with_pseudo_labels) {
            if (!it->pseudo_label) throw ValidationError("demonstration is missing its pseudo-label");
            if (it->pseudo_label->valid) d.label = it->pseudo_label->label;
        }
        rendered.push_back(std::move(d));
    }
    return build_demonstration_prompt(example.text, rendered, label_space);
}

BasePredictor::BasePredictor(BasePredictorSpec spec, Predictor& predictor, std::vector<std::string> label_space,
                             std::optional<PoolView> pool)
    : spec_(spec), predictor_(predictor), label_space_(std::move(label_space)), pool_(pool) {
    spec_.validate();
    if (label_space_.empty()) throw ValidationError("label space is empty");
    if (spec_.uses_demonstrations()) {
        if (!pool_) throw ValidationError(std::string(to_string(spec_.kind)) + " needs a retrieval pool");
        if (spec_.kind == BaseKind::knn_icl_p) {
            pseudo_once_ = std::make_unique<std::once_flag[]>(pool_->corpus.size());
            pseudo_.resize(pool_->corpus.size());
        }
    }
}

const Prediction& BasePredictor::pseudo_label(std::size_t pool_index) {
    std::call_once(pseudo_once_[pool_index], [&] {
        pseudo_[pool_index] = standard_predict(pool_->corpus[pool_index], predictor_, label_space_);
    });
    return pseudo_[pool_index];
}

Prediction BasePredictor::predict(const Example& example, std::optional<std::size_t> pool_index) {
    switch (spec_.kind) {
        case BaseKind::standard: return standard_predict(example, predictor_, label_space_);
        case BaseKind::self_consistency: return self_consistency(example, spec_.n_samples, predictor_, label_space_);
        case BaseKind::best_of_n: return best_of_n(example, spec_.n_samples, predictor_, label_space_, false);
        case BaseKind::weighted_best_of_n: return best_of_n(example, spec_.n_samples, predictor_, label_space_, true);
        case BaseKind::knn_icl:
        case BaseKind::knn_icl_p: break;
    }

    if (!example.embedding) throw ValidationError("example '" + example.id + "' has no embedding for demonstration retrieval");
    const Neighborhood demos_nh = pool_->index.search(example.id, *example.embedding, spec_.k_demos,
                                                      {.include_anchor = false, .exclude = pool_index});
    const bool with_labels = spec_.kind == BaseKind::knn_icl_p;
    std::vector<IclDemo> demos;
    demos.reserve(demos_nh.size());
    for (std::size_t idx : demos_nh.indices) {
        IclDemo d{pool_->corpus[idx].text, std::nullopt};
        if (with_labels) d.pseudo_label = pseudo_label(idx);
        demos.push_back(std::move(d));
    }
    const std::string prompt = knn_icl_prompt(example, demos, with_labels, label_space_);
    return predictor_.predict_with_prompt(example, prompt, label_space_, 0);
}

}  // namespace nuc
