#include "nuc/pipeline.hpp"

#include "nuc/csv.hpp"
#include "nuc/error.hpp"
#include "nuc/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <set>

namespace nuc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(BackendKind kind) { return kind == BackendKind::remote ? "remote" : "simulated"; }

BackendKind parse_backend_kind(std::string_view name) {
    if (name == "simulated") return BackendKind::simulated;
    if (name == "remote") return BackendKind::remote;
    throw ValidationError("unknown backend '" + std::string(name) + "' (expected simulated or remote)");
}

std::string_view to_string(NeighborMode mode) { return mode == NeighborMode::standard ? "standard" : "base"; }

NeighborMode parse_neighbor_mode(std::string_view name) {
    if (name == "base") return NeighborMode::base;
    if (name == "standard") return NeighborMode::standard;
    throw ValidationError("unknown neighbor mode '" + std::string(name) + "' (expected base or standard)");
}

void ExperimentConfig::validate() const {
    base.validate();
    policy.validate();
    predictor.validate();
    if (backend == BackendKind::simulated) oracle.validate();
    if (k_neighbors == 0) throw ValidationError("k: must be >= 1");
    if (seeds.empty()) throw ValidationError("seeds: must not be empty");
    if (parallelism == 0) throw ValidationError("parallelism: must be >= 1");
    if (!(simulated_call_latency >= 0.0)) throw ValidationError("simulated_call_latency: must be >= 0");
    if (!(cost.token_inflation > 0.0)) throw ValidationError("token_inflation: must be > 0");
    if (!(cost.price_per_1k_tokens >= 0.0)) throw ValidationError("price_per_1k_tokens: must be >= 0");
    if (cache_enabled && cache_path.empty()) throw ValidationError("cache: caching is enabled but no cache path is set");
}

namespace {

void require_file(std::string_view field, const std::filesystem::path& p) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec))
        throw ValidationError(std::string(field) + ": '" + p.string() + "' is not a readable file");
}

}  // namespace

void ExperimentConfig::validate_paths() const {
    if (!data_path.empty()) {
        if (!pool_path.empty() || !test_path.empty())
            throw ValidationError("data: give either data or pool + test, not both");
        if (test_size == 0) throw ValidationError("test_size: must be >= 1");
        require_file("data", data_path);
        return;
    }
    if (pool_path.empty()) throw ValidationError("pool: no pool dataset path given");
    if (test_path.empty()) throw ValidationError("test: no test dataset path given");
    require_file("pool", pool_path);
    require_file("test", test_path);
}

std::string ExperimentConfig::method_name() const {
    std::string name(to_string(base.kind));
    if (base.kind == BaseKind::self_consistency || base.kind == BaseKind::best_of_n ||
        base.kind == BaseKind::weighted_best_of_n)
        name += "(n=" + std::to_string(base.n_samples) + ")";
    if (base.uses_demonstrations()) name += "(k=" + std::to_string(base.k_demos) + ")";
    if (testnuc) {
        name += "+testnuc(k=" + std::to_string(k_neighbors) + "," + std::string(to_string(policy.kind));
        if (policy.kind == PolicyKind::filtered_weighted) {
            name += ",theta=" + format_number(policy.theta);
        }
        if (neighbor_mode == NeighborMode::standard) name += ",neighbors=standard";
        name += ")";
    }
    return name;
}

TestNucResult testnuc_predict(const Example& example, const PoolView& pool, BasePredictor& anchor_method,
                              BasePredictor& neighbor_method, std::size_t k, const AggregationPolicy& policy) {
    if (!example.embedding) throw ValidationError("example '" + example.id + "' has no embedding");
    TestNucResult out;
    out.neighborhood = pool.index.search(example.id, *example.embedding, k, {.include_anchor = true});

    std::vector<Vote> votes;
    votes.reserve(out.neighborhood.size());
    out.member_predictions.reserve(out.neighborhood.size());
    for (std::size_t r = 0; r < out.neighborhood.size(); ++r) {
        const std::size_t idx = out.neighborhood.indices[r];
        const bool is_anchor = idx == kAnchorSlot;
        Prediction p = is_anchor ? anchor_method.predict(example) : neighbor_method.predict(pool.corpus[idx], idx);
        votes.push_back({.label = p.valid ? p.label : std::string(),
                         .weight = std::max(0.0, out.neighborhood.similarities[r]),
                         .confidence = p.valid ? p.confidence : 0.0,
                         .admitted = p.valid,
                         .gate_exempt = is_anchor && policy.always_admit_anchor});
        out.member_predictions.push_back(std::move(p));
    }

    out.outcome = aggregate(votes, policy, votes.front());
    const Prediction& anchor = out.member_predictions.front();
    out.prediction.label = out.outcome.label;
    out.prediction.valid = !out.outcome.label.empty();
    out.prediction.confidence = out.prediction.valid ? out.outcome.confidence() : 0.0;
    out.prediction.source = anchor.source;
    out.prediction.raw = anchor.raw;
    return out;
}

TestNucResult testnuc_s_predict(const Example& example, const PoolView& pool, BasePredictor& anchor_method,
                                BasePredictor& neighbor_method, std::size_t k, const AggregationPolicy& policy) {
    if (!neighbor_method.predictor().cache()) throw ValidationError("TestNUC-S needs a prediction cache");
    return testnuc_predict(example, pool, anchor_method, neighbor_method, k, policy);
}

std::shared_ptr<Backend> make_backend(const ExperimentConfig& cfg, std::int64_t seed) {
    if (cfg.backend == BackendKind::simulated)
        return std::make_shared<SimulatedBackend>(cfg.oracle, static_cast<std::uint64_t>(seed));
    RetryPolicy retry;
    retry.max_retries = cfg.predictor.max_retries;
    return std::make_shared<RemoteChatBackend>(cfg.llm_base_url, cfg.llm_api_key, retry);
}

ExperimentData load_experiment_data(const ExperimentConfig& cfg, std::int64_t seed) {
    cfg.validate_paths();
    if (!cfg.data_path.empty()) {
        Corpus all = load_jsonl(cfg.data_path);
        if (all.empty()) throw ValidationError("data: dataset '" + cfg.data_path.string() + "' is empty");
        auto split = split_test_pool(normalize(all), cfg.test_size, static_cast<std::uint64_t>(seed));
        return {std::move(split.test), std::move(split.pool)};
    }
    Corpus test = load_jsonl(cfg.test_path);
    Corpus pool = load_jsonl(cfg.pool_path);
    if (test.empty()) throw ValidationError("test: dataset '" + cfg.test_path.string() + "' is empty");
    return {normalize(test), pool.empty() ? pool : normalize(pool)};
}

namespace {

std::vector<std::string> merged_label_space(const Corpus& test, const Corpus& pool) {
    std::set<std::string> labels(test.label_space().begin(), test.label_space().end());
    labels.insert(pool.label_space().begin(), pool.label_space().end());
    return {labels.begin(), labels.end()};
}

RunReport summarize(const ExperimentConfig& cfg, std::int64_t seed, std::vector<ExampleResult> results,
                    const PredictorCounters& counters, double measured_seconds) {
    RunReport r;
    r.method = cfg.method_name();
    r.seed = seed;
    r.k_neighbors = cfg.testnuc ? cfg.k_neighbors : 0;
    std::size_t correct = 0;
    for (const auto& e : results) correct += e.correct ? 1 : 0;
    r.accuracy = results.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(results.size());
    r.per_example = std::move(results);
    r.predictor_calls = counters.calls;
    r.cache_hits = counters.cache_hits;
    r.token_estimate = counters.tokens;
    r.estimated_cost = cfg.cost.cost(counters.tokens);
    r.wall_time_seconds = cfg.backend == BackendKind::simulated
                              ? static_cast<double>(counters.calls) * cfg.simulated_call_latency
                              : measured_seconds;
    return r;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const Corpus& test, const Corpus& pool, std::int64_t seed,
                         std::shared_ptr<PredictionCache> cache, std::shared_ptr<Backend> backend) {
    cfg.validate();
    if (test.empty()) throw ValidationError("test: the test set is empty");
    if (!test.fully_labeled()) throw ValidationError("test: every test example needs a gold label");
    const auto labels = merged_label_space(test, pool);
    if (labels.empty()) throw ValidationError("no labels observed in the test or pool data");

    if (!backend) backend = make_backend(cfg, seed);
    if (!cache && cfg.cache_enabled) cache = std::make_shared<PredictionCache>();
    PredictorConfig pc = cfg.predictor;
    pc.seed = seed;
    Predictor predictor(backend, pc, cache, cfg.cost);

    const bool needs_index = cfg.testnuc || cfg.base.uses_demonstrations();
    EmbeddingIndex index = needs_index ? EmbeddingIndex(pool) : EmbeddingIndex();
    const PoolView view{pool, index};
    BasePredictor base(cfg.base, predictor, labels, needs_index ? std::optional<PoolView>(view) : std::nullopt);
    BasePredictor standard({.kind = BaseKind::standard}, predictor, labels);
    BasePredictor& neighbor_method = cfg.neighbor_mode == NeighborMode::standard ? standard : base;

    std::vector<ExampleResult> results(test.size());
    std::vector<char> done(test.size(), 0);
    const auto start = std::chrono::steady_clock::now();
    try {
        parallel_for(test.size(), cfg.parallelism, [&](std::size_t i) {
            const Example& ex = test[i];
            Prediction p;
            try {
                p = cfg.testnuc ? testnuc_predict(ex, view, base, neighbor_method, cfg.k_neighbors, cfg.policy).prediction
                                : base.predict(ex);
            } catch (const ValidationError& e) {
                throw ValidationError("example '" + ex.id + "': " + e.what());
            } catch (const RemoteError& e) {
                throw RemoteError("example '" + ex.id + "': " + e.what());
            }
            results[i] = {ex.id, *ex.gold_label, p.valid ? p.label : std::string(), p.confidence,
                          p.valid && p.label == *ex.gold_label};
            done[i] = 1;
        });
    } catch (const std::exception& e) {
        std::vector<ExampleResult> completed;
        for (std::size_t i = 0; i < results.size(); ++i)
            if (done[i]) completed.push_back(results[i]);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        throw ExperimentAborted(e.what(), summarize(cfg, seed, std::move(completed), predictor.counters(), secs),
                                std::current_exception());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summarize(cfg, seed, std::move(results), predictor.counters(), secs);
}

PredictorCounters warm_cache(const ExperimentConfig& cfg, const Corpus& test, const Corpus& pool, std::int64_t seed,
                             std::shared_ptr<PredictionCache> cache, std::shared_ptr<Backend> backend) {
    cfg.validate();
    if (!cache) throw ValidationError("cache: warming needs a prediction cache");
    const auto labels = merged_label_space(test, pool);
    if (!backend) backend = make_backend(cfg, seed);
    PredictorConfig pc = cfg.predictor;
    pc.seed = seed;
    Predictor predictor(backend, pc, cache, cfg.cost);

    const bool needs_index = cfg.base.uses_demonstrations();
    EmbeddingIndex index = needs_index ? EmbeddingIndex(pool) : EmbeddingIndex();
    const PoolView view{pool, index};
    BasePredictor base(cfg.base, predictor, labels, needs_index ? std::optional<PoolView>(view) : std::nullopt);
    BasePredictor standard({.kind = BaseKind::standard}, predictor, labels);
    BasePredictor& method = cfg.neighbor_mode == NeighborMode::standard ? standard : base;
    parallel_for(pool.size(), cfg.parallelism, [&](std::size_t i) { method.predict(pool[i], i); });
    return predictor.counters();
}

std::vector<RunReport> run_experiments(const ExperimentConfig& cfg) {
    cfg.validate();
    cfg.validate_paths();
    std::shared_ptr<PredictionCache> cache;
    if (cfg.cache_enabled) cache = std::make_shared<PredictionCache>(cfg.cache_path);
    std::vector<RunReport> out;
    for (auto seed : cfg.seeds) {
        const auto data = load_experiment_data(cfg, seed);
        out.push_back(run_experiment(cfg, data.test, data.pool, seed, cache));
    }
    return out;
}

ordered_json to_json(const RunReport& r) {
    ordered_json rows = ordered_json::array();
    for (const auto& e : r.per_example)
        rows.push_back({{"id", e.id}, {"gold", e.gold}, {"predicted", e.predicted}, {"confidence", e.confidence},
                        {"correct", e.correct}});
    return {{"method", r.method},
            {"seed", r.seed},
            {"k_neighbors", r.k_neighbors},
            {"accuracy", r.accuracy},
            {"predictor_calls", r.predictor_calls},
            {"cache_hits", r.cache_hits},
            {"token_estimate", r.token_estimate},
            {"estimated_cost", r.estimated_cost},
            {"wall_time_seconds", r.wall_time_seconds},
            {"per_example", std::move(rows)}};
}

RunReport report_from_json(const json& j) {
    RunReport r;
    try {
        r.method = j.at("method").get<std::string>();
        r.seed = j.at("seed").get<std::int64_t>();
        r.k_neighbors = j.value("k_neighbors", std::size_t{0});
        r.accuracy = j.at("accuracy").get<double>();
        r.predictor_calls = j.at("predictor_calls").get<std::uint64_t>();
        r.cache_hits = j.at("cache_hits").get<std::uint64_t>();
        r.token_estimate = j.at("token_estimate").get<std::uint64_t>();
        r.estimated_cost = j.value("estimated_cost", 0.0);
        r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
        for (const auto& e : j.at("per_example"))
            r.per_example.push_back({e.at("id").get<std::string>(), e.at("gold").get<std::string>(),
                                     e.at("predicted").get<std::string>(), e.at("confidence").get<double>(),
                                     e.at("correct").get<bool>()});
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed run report: ") + e.what());
    }
    return r;
}

void write_reports_json(std::ostream& out, const std::vector<RunReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
}

void write_reports_csv(std::ostream& out, const std::vector<RunReport>& reports) {
    out << "method,seed,id,gold,predicted,confidence,correct\n";
    for (const auto& r : reports)
        for (const auto& e : r.per_example)
            out << csv_field(r.method) << ',' << r.seed << ',' << csv_field(e.id) << ',' << csv_field(e.gold) << ','
                << csv_field(e.predicted) << ',' << format_number(e.confidence) << ',' << (e.correct ? 1 : 0) << '\n';
}

}  // namespace nuc
