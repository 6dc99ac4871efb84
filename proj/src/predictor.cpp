#include "nuc/predictor.hpp"

#include "nuc/error.hpp"
#include "nuc/prompt.hpp"
#include "nuc/response_parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace nuc {

using json = nlohmann::json;

std::string_view to_string(PredictionSource source) {
    switch (source) {
        case PredictionSource::remote: return "remote";
        case PredictionSource::simulated: return "simulated";
        case PredictionSource::cache: return "cache";
    }
    return "unknown";
}

void PredictorConfig::validate() const {
    if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ValidationError("top_p must be in (0, 1]");
    if (model_name.empty()) throw ValidationError("model name is empty");
    if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
    if (parallelism == 0) throw ValidationError("parallelism must be positive");
}

SimulatedBackend::SimulatedBackend(OracleParams params, std::uint64_t seed) : params_(params), seed_(seed) {
    params_.validate();
}

std::string SimulatedBackend::identity(const PredictorConfig&) const {
    json id = {{"backend", "simulated"},
               {"accuracy", params_.accuracy},
               {"consistency", params_.consistency},
               {"correct_beta", {params_.correct_confidence.alpha, params_.correct_confidence.beta}},
               {"incorrect_beta", {params_.incorrect_confidence.alpha, params_.incorrect_confidence.beta}},
               {"seed", seed_}};
    return id.dump();
}

BackendReply SimulatedBackend::complete(const PredictRequest& request, const PredictorConfig&) {
    return {simulated_oracle(request.example, params_, request.draw, seed_, request.label_space), 1};
}

RemoteChatBackend::RemoteChatBackend(std::string base_url, std::string api_key, RetryPolicy retry)
    : api_key_(api_key.empty() ? env_or_empty("NUC_LLM_API_KEY") : std::move(api_key)), retry_(retry) {
    if (base_url.empty()) base_url = env_or_empty("NUC_LLM_BASE_URL");
    if (base_url.empty()) throw ValidationError("no LLM base URL (set llm_base_url or NUC_LLM_BASE_URL)");
    endpoint_ = join_url(base_url, "chat/completions");
}

BackendReply RemoteChatBackend::complete(const PredictRequest& request, const PredictorConfig& cfg) {
    RetryPolicy retry = retry_;
    retry.max_retries = cfg.max_retries;
    const json body = {{"model", cfg.model_name},
                       {"temperature", cfg.temperature},
                       {"top_p", cfg.top_p},
                       {"n", 1},
                       {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};

    BackendReply reply;
    reply.calls = 0;
    std::string last_raw;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const json response = post_json(endpoint_, body, api_key_, retry);
        ++reply.calls;
        try {
            last_raw = response.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw RemoteError(std::string("chat response has no choices[0].message.content: ") + e.what());
        }
        Prediction p = parse_response(last_raw, request.label_space);
        if (p.valid) {
            reply.prediction = std::move(p);
            return reply;
        }
    }
    reply.prediction = Prediction::invalid(last_raw, PredictionSource::remote);
    return reply;
}

Predictor::Predictor(std::shared_ptr<Backend> backend, PredictorConfig cfg, std::shared_ptr<PredictionCache> cache,
                     CostModel cost)
    : backend_(std::move(backend)), cfg_(std::move(cfg)), cache_(std::move(cache)), cost_(cost) {
    if (!backend_) throw ValidationError("predictor needs a backend");
    cfg_.validate();
    identity_ = backend_->identity(cfg_);
}

std::string Predictor::fingerprint(const std::string& prompt, std::uint32_t draw) const {
    return prompt_fingerprint(identity_, prompt, cfg_.temperature, cfg_.top_p, draw);
}

Prediction Predictor::predict(const Example& example, const std::vector<std::string>& label_space,
                              std::uint32_t draw) {
    return predict_with_prompt(example, build_prompt(example.text, label_space), label_space, draw);
}

Prediction Predictor::call_backend(const PredictRequest& request) {
    BackendReply reply = backend_->complete(request, cfg_);
    calls_ += reply.calls;
    tokens_ += reply.calls * cost_.prompt_tokens(request.prompt);
    Prediction& p = reply.prediction;
    if (p.valid && !(p.confidence >= 0.0 && p.confidence <= 1.0))
        throw RemoteError("backend returned confidence outside [0, 1] for '" + request.example.id + "'");
    if (p.valid && std::find(request.label_space.begin(), request.label_space.end(), p.label) ==
                       request.label_space.end())
        p = Prediction::invalid(p.raw, p.source);
    return p;
}

Prediction Predictor::predict_with_prompt(const Example& example, const std::string& prompt,
                                          const std::vector<std::string>& label_space, std::uint32_t draw) {
    const PredictRequest request{example, prompt, draw, label_space};
    if (!cache_) return call_backend(request);

    const std::string fp = fingerprint(prompt, draw);
    if (auto hit = cache_->get(fp)) {
        ++hits_;
        return *hit;
    }

    std::promise<Prediction> promise;
    {
        std::unique_lock lock(inflight_mutex_);
        if (auto hit = cache_->get(fp)) {
            ++hits_;
            return *hit;
        }
        if (auto it = inflight_.find(fp); it != inflight_.end()) {
            auto pending = it->second;
            lock.unlock();
            ++hits_;
            Prediction p = pending.get();
            p.source = PredictionSource::cache;
            return p;
        }
        inflight_.emplace(fp, promise.get_future().share());
    }

    try {
        Prediction p = call_backend(request);
        cache_->put(fp, p);
        promise.set_value(p);
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(fp);
        return p;
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(fp);
        throw;
    }
}

PredictorCounters Predictor::counters() const { return {calls_.load(), hits_.load(), tokens_.load()}; }

void Predictor::reset_counters() {
    calls_ = 0;
    hits_ = 0;
    tokens_ = 0;
}

}  // namespace nuc
