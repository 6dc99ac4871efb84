#pragma once

#include "nuc/corpus.hpp"
#include "nuc/cost.hpp"
#include "nuc/http.hpp"
#include "nuc/prediction.hpp"
#include "nuc/prediction_cache.hpp"
#include "nuc/simulated_oracle.hpp"

#include <atomic>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace nuc {

struct PredictRequest {
    const Example& example;
    const std::string& prompt;
    std::uint32_t draw;
    const std::vector<std::string>& label_space;
};

struct BackendReply {
    Prediction prediction;
    // Model invocations spent, including re-asks.
    std::size_t calls = 1;
};

/// Something that turns a prompt into a prediction. Implementations must be safe
/// to call concurrently.
class Backend {
public:
    virtual ~Backend() = default;
    /// Model identity used in cache fingerprints.
    virtual std::string identity(const PredictorConfig& cfg) const = 0;
    virtual BackendReply complete(const PredictRequest& request, const PredictorConfig& cfg) = 0;
};

/// Noisy labeler keyed on the example, not the prompt. Its identity encodes
/// every parameter so caches never mix differently-configured oracles.
class SimulatedBackend final : public Backend {
public:
    SimulatedBackend(OracleParams params, std::uint64_t seed);

    std::string identity(const PredictorConfig& cfg) const override;
    BackendReply complete(const PredictRequest& request, const PredictorConfig& cfg) override;

    const OracleParams& params() const noexcept { return params_; }

private:
    OracleParams params_;
    std::uint64_t seed_;
};

/// OpenAI-compatible chat-completions client. One re-ask on an unparseable
/// reply, after which the prediction is invalid with confidence 0.
class RemoteChatBackend final : public Backend {
public:
    /// Empty arguments fall back to NUC_LLM_BASE_URL / NUC_LLM_API_KEY.
    RemoteChatBackend(std::string base_url = {}, std::string api_key = {}, RetryPolicy retry = {});

    std::string identity(const PredictorConfig& cfg) const override { return cfg.model_name; }
    BackendReply complete(const PredictRequest& request, const PredictorConfig& cfg) override;

private:
    Endpoint endpoint_;
    std::string api_key_;
    RetryPolicy retry_;
};

struct PredictorCounters {
    std::uint64_t calls = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t tokens = 0;
};

/// Backend plus optional read-through cache plus call accounting.
///
/// With a cache, concurrent misses on one fingerprint are collapsed into a
/// single backend call; the waiters count as cache hits. This keeps the
/// counters independent of scheduling.
class Predictor {
public:
    Predictor(std::shared_ptr<Backend> backend, PredictorConfig cfg, std::shared_ptr<PredictionCache> cache = nullptr,
              CostModel cost = {});

    Predictor(const Predictor&) = delete;
    Predictor& operator=(const Predictor&) = delete;

    /// Zero-shot prediction with the standard prompt.
    Prediction predict(const Example& example, const std::vector<std::string>& label_space, std::uint32_t draw = 0);

    Prediction predict_with_prompt(const Example& example, const std::string& prompt,
                                   const std::vector<std::string>& label_space, std::uint32_t draw = 0);

    std::string fingerprint(const std::string& prompt, std::uint32_t draw) const;

    PredictorCounters counters() const;
    void reset_counters();

    const PredictorConfig& config() const noexcept { return cfg_; }
    const std::shared_ptr<PredictionCache>& cache() const noexcept { return cache_; }
    const CostModel& cost_model() const noexcept { return cost_; }

private:
    Prediction call_backend(const PredictRequest& request);

    std::shared_ptr<Backend> backend_;
    PredictorConfig cfg_;
    std::shared_ptr<PredictionCache> cache_;
    CostModel cost_;
    std::string identity_;

    std::atomic<std::uint64_t> calls_{0};
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> tokens_{0};

    std::mutex inflight_mutex_;
    std::unordered_map<std::string, std::shared_future<Prediction>> inflight_;
};

}  // namespace nuc
