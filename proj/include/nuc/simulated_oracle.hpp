#pragma once

#include "nuc/corpus.hpp"
#include "nuc/prediction.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nuc {

struct BetaParams {
    double alpha;
    double beta;
};

/// Parameters of the noisy labeler that stands in for an LLM.
struct OracleParams {
    double accuracy = 0.65;
    double consistency = 1.0;
    BetaParams correct_confidence{8.0, 2.0};
    BetaParams incorrect_confidence{2.0, 5.0};

    void validate() const;
};

/// Deterministic noisy labeler. The result is a pure function of
/// (example id, draw, seed, params, label space).
///
/// Draw 0 emits the gold label with probability `accuracy`, otherwise a label
/// drawn uniformly from the remaining labels. A gold label outside the label
/// space (for example the OOD sentinel) always yields a uniformly random label.
/// Every later draw repeats draw 0 with probability `consistency` and is an
/// independent resample otherwise. Confidence comes from `correct_confidence`
/// when the emitted label is gold and from `incorrect_confidence` otherwise.
Prediction simulated_oracle(const Example& example, const OracleParams& params, std::uint32_t draw,
                            std::uint64_t seed, const std::vector<std::string>& label_space);

}  // namespace nuc
