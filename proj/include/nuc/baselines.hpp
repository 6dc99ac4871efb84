#pragma once

#include "nuc/corpus.hpp"
#include "nuc/prediction.hpp"
#include "nuc/predictor.hpp"
#include "nuc/retrieval.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nuc {

// knn_icl is also known as TopK-ICL; knn_icl_p adds pseudo-labels to the
// demonstrations.
enum class BaseKind { standard, self_consistency, best_of_n, weighted_best_of_n, knn_icl, knn_icl_p };

std::string_view to_string(BaseKind kind);
BaseKind parse_base_kind(std::string_view name);

struct BasePredictorSpec {
    BaseKind kind = BaseKind::standard;
    std::size_t n_samples = 10;
    std::size_t k_demos = 10;

    void validate() const;
    bool uses_demonstrations() const noexcept { return kind == BaseKind::knn_icl || kind == BaseKind::knn_icl_p; }
    /// Backend calls per item on a cold cache with no demonstration reuse.
    std::size_t calls_per_item() const noexcept;
};

/// One backend call with the zero-shot prompt.
Prediction standard_predict(const Example& example, Predictor& predictor, const std::vector<std::string>& label_space);

/// Majority label over `n` draws; confidence is the modal fraction. With n = 1
/// the single draw is returned unchanged.
Prediction self_consistency(const Example& example, std::size_t n, Predictor& predictor,
                            const std::vector<std::string>& label_space);

/// Highest-confidence draw (earliest on ties), or with `weighted` the label with
/// the largest summed confidence. With n = 1 the single draw is returned unchanged.
Prediction best_of_n(const Example& example, std::size_t n, Predictor& predictor,
                     const std::vector<std::string>& label_space, bool weighted);

struct IclDemo {
    std::string text;
    // Standard-prompting prediction; required when pseudo-labels are rendered.
    std::optional<Prediction> pseudo_label;
};

/// Demonstration prompt with `demos` given nearest first and rendered nearest
/// last. Invalid pseudo-labels render without a "Label:" line.
std::string knn_icl_prompt(const Example& example, std::span<const IclDemo> demos, bool with_pseudo_labels,
                           const std::vector<std::string>& label_space);

struct PoolView {
    const Corpus& corpus;
    const EmbeddingIndex& index;
};

/// Uniform "base predictor" interface over every kind, so that TestNUC can wrap
/// any of them. Safe for concurrent use.
class BasePredictor {
public:
    BasePredictor(BasePredictorSpec spec, Predictor& predictor, std::vector<std::string> label_space,
                  std::optional<PoolView> pool = std::nullopt);

    /// `pool_index` identifies `example` as a pool member so demonstrations
    /// never include the example itself.
    Prediction predict(const Example& example, std::optional<std::size_t> pool_index = std::nullopt);

    const BasePredictorSpec& spec() const noexcept { return spec_; }
    const std::vector<std::string>& label_space() const noexcept { return label_space_; }
    Predictor& predictor() noexcept { return predictor_; }

private:
    const Prediction& pseudo_label(std::size_t pool_index);

    BasePredictorSpec spec_;
    Predictor& predictor_;
    std::vector<std::string> label_space_;
    std::optional<PoolView> pool_;

    // Standard predictions of pool members, computed at most once each.
    std::unique_ptr<std::once_flag[]> pseudo_once_;
    std::vector<Prediction> pseudo_;
};

}  // namespace nuc
