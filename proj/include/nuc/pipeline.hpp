#pragma once

#include "nuc/aggregation.hpp"
#include "nuc/baselines.hpp"
#include "nuc/corpus.hpp"
#include "nuc/cost.hpp"
#include "nuc/predictor.hpp"
#include "nuc/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nuc {

enum class BackendKind { simulated, remote };
std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

// Which predictor labels the retrieved neighbors: the wrapped base method, or
// plain standard prompting.
enum class NeighborMode { base, standard };
std::string_view to_string(NeighborMode mode);
NeighborMode parse_neighbor_mode(std::string_view name);

struct ExperimentConfig {
    BasePredictorSpec base{};
    AggregationPolicy policy{};
    std::size_t k_neighbors = 10;
    // false evaluates the base predictor on its own.
    bool testnuc = true;
    NeighborMode neighbor_mode = NeighborMode::base;

    // Either pool + test, or a single data file split by seeded shuffle.
    std::filesystem::path pool_path;
    std::filesystem::path test_path;
    std::filesystem::path data_path;
    std::size_t test_size = 500;

    BackendKind backend = BackendKind::simulated;
    PredictorConfig predictor{};
    OracleParams oracle{};
    std::string llm_base_url;
    std::string llm_api_key;

    bool cache_enabled = false;
    std::filesystem::path cache_path;

    std::vector<std::int64_t> seeds{0};
    std::size_t parallelism = 1;
    CostModel cost{};
    // Per-call latency charged to simulated runs so their reports stay
    // reproducible (seconds).
    double simulated_call_latency = 0.682;

    /// Checks parameters; paths are checked by validate_paths().
    void validate() const;
    void validate_paths() const;
    std::string method_name() const;
};

struct ExampleResult {
    std::string id;
    std::string gold;
    std::string predicted;  // empty for an invalid prediction
    double confidence = 0.0;
    bool correct = false;
};

struct RunReport {
    std::string method;
    std::int64_t seed = 0;
    std::size_t k_neighbors = 0;
    double accuracy = 0.0;
    std::vector<ExampleResult> per_example;
    std::uint64_t predictor_calls = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t token_estimate = 0;
    double estimated_cost = 0.0;
    double wall_time_seconds = 0.0;
};

struct TestNucResult {
    Prediction prediction;
    Neighborhood neighborhood;
    // Base predictions of the neighborhood members, in rank order.
    std::vector<Prediction> member_predictions;
    VoteOutcome outcome;
};

/// Retrieves the anchor plus its k-1 nearest pool members, labels each with the
/// base predictor (`neighbor_method` for pool members), weights votes by
/// similarity (negative similarities count as 0) and aggregates under `policy`.
/// The returned confidence is the winning tally share.
TestNucResult testnuc_predict(const Example& example, const PoolView& pool, BasePredictor& anchor_method,
                              BasePredictor& neighbor_method, std::size_t k, const AggregationPolicy& policy);

/// testnuc_predict against a prediction store: requires the predictor to have a
/// cache. Neighbors found in the cache cost nothing; cold entries are predicted
/// and stored.
TestNucResult testnuc_s_predict(const Example& example, const PoolView& pool, BasePredictor& anchor_method,
                                BasePredictor& neighbor_method, std::size_t k, const AggregationPolicy& policy);

struct ExperimentData {
    Corpus test;
    Corpus pool;
};

/// Loads and normalizes the configured datasets for one seed.
ExperimentData load_experiment_data(const ExperimentConfig& cfg, std::int64_t seed);

/// Builds the backend configured in `cfg` for `seed`.
std::shared_ptr<Backend> make_backend(const ExperimentConfig& cfg, std::int64_t seed);

/// Thrown when an example fails hard. Carries the report over the examples that
/// completed and the original error.
class ExperimentAborted : public std::runtime_error {
public:
    ExperimentAborted(const std::string& what, RunReport partial, std::exception_ptr cause)
        : std::runtime_error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}

    const RunReport& partial() const noexcept { return partial_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    RunReport partial_;
    std::exception_ptr cause_;
};

/// Evaluates every test example. `test` and `pool` must be embedded. With a
/// simulated backend the report is a pure function of the inputs.
RunReport run_experiment(const ExperimentConfig& cfg, const Corpus& test, const Corpus& pool, std::int64_t seed,
                         std::shared_ptr<PredictionCache> cache = nullptr, std::shared_ptr<Backend> backend = nullptr);

/// Labels every pool member with the neighbor method, storing the results in
/// `cache` so TestNUC runs over the same data find them there. Returns the
/// counters spent.
PredictorCounters warm_cache(const ExperimentConfig& cfg, const Corpus& test, const Corpus& pool, std::int64_t seed,
                             std::shared_ptr<PredictionCache> cache, std::shared_ptr<Backend> backend = nullptr);

/// Loads the configured data and runs once per seed. A cache is opened at
/// cfg.cache_path when caching is enabled.
std::vector<RunReport> run_experiments(const ExperimentConfig& cfg);

nlohmann::ordered_json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);
void write_reports_json(std::ostream& out, const std::vector<RunReport>& reports);
void write_reports_csv(std::ostream& out, const std::vector<RunReport>& reports);

}  // namespace nuc
