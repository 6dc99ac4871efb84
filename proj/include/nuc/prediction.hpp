#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace nuc {

enum class PredictionSource { remote, simulated, cache };

std::string_view to_string(PredictionSource source);

struct Prediction {
    // Empty when `valid` is false.
    std::string label;
    double confidence = 0.0;
    std::string raw;
    PredictionSource source = PredictionSource::remote;
    bool valid = true;
    // Set when the response carried no usable confidence and 0.5 was assumed.
    bool confidence_defaulted = false;

    static Prediction invalid(std::string raw, PredictionSource source) {
        return {.label = {}, .confidence = 0.0, .raw = std::move(raw), .source = source, .valid = false};
    }
};

/// Same decision, ignoring where it came from.
inline bool same_decision(const Prediction& a, const Prediction& b) {
    return a.valid == b.valid && a.label == b.label && a.confidence == b.confidence && a.raw == b.raw;
}

struct PredictorConfig {
    double temperature = 0.7;
    double top_p = 1.0;
    std::string model_name = "gpt-4o-mini";
    int max_retries = 3;
    std::size_t parallelism = 4;
    std::int64_t seed = 0;

    void validate() const;
};

}  // namespace nuc
