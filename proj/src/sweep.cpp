#include "nuc/sweep.hpp"

#include "nuc/analysis.hpp"
#include "nuc/csv.hpp"
#include "nuc/error.hpp"
#include "nuc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace nuc {

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::k_neighbors: return "k_neighbors";
        case SweepAxis::pool_size: return "pool_size";
        case SweepAxis::ood_ratio: return "ood_ratio";
        case SweepAxis::theta: return "theta";
    }
    return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    for (auto a : {SweepAxis::k_neighbors, SweepAxis::pool_size, SweepAxis::ood_ratio, SweepAxis::theta})
        if (to_string(a) == name) return a;
    throw ValidationError("unknown sweep axis '" + std::string(name) +
                          "' (expected k_neighbors, pool_size, ood_ratio or theta)");
}

namespace {

bool is_count(double v) { return v >= 1.0 && std::floor(v) == v && v < 1e12; }

void check_value(SweepAxis axis, double v) {
    switch (axis) {
        case SweepAxis::k_neighbors:
        case SweepAxis::pool_size:
            if (!is_count(v))
                throw ValidationError(std::string(to_string(axis)) + " values must be positive integers");
            break;
        case SweepAxis::ood_ratio:
        case SweepAxis::theta:
            if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(to_string(axis)) + " values must be in [0, 1]");
            break;
    }
}

Corpus pool_prefix(const Corpus& pool, std::size_t n, std::int64_t seed) {
    if (n > pool.size())
        throw ValidationError("pool_size " + std::to_string(n) + " exceeds the pool of " + std::to_string(pool.size()));
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(n);
    return subset(pool, order);
}

RunReport run_cell(SweepAxis axis, double value, std::int64_t seed, ExperimentConfig cfg, const SweepData& data) {
    cfg.parallelism = 1;
    switch (axis) {
        case SweepAxis::k_neighbors:
            cfg.k_neighbors = static_cast<std::size_t>(value);
            cfg.testnuc = true;
            return run_experiment(cfg, data.test, data.pool, seed);
        case SweepAxis::pool_size:
            return run_experiment(cfg, data.test, pool_prefix(data.pool, static_cast<std::size_t>(value), seed), seed);
        case SweepAxis::ood_ratio: {
            if (!data.ood_source) throw ValidationError("ood_ratio sweeps need an OOD source corpus");
            const Corpus pool = inject_ood(data.pool, *data.ood_source, value, static_cast<std::uint64_t>(seed));
            return run_experiment(cfg, data.test, pool, seed);
        }
        case SweepAxis::theta:
            cfg.policy.kind = PolicyKind::filtered_weighted;
            cfg.policy.theta = value;
            return run_experiment(cfg, data.test, data.pool, seed);
    }
    throw ValidationError("unknown sweep axis");
}

}  // namespace

std::vector<SweepCell> run_sweep(SweepAxis axis, std::span<const double> values, const ExperimentConfig& cfg,
                                 const SweepDataSource& data) {
    if (values.empty()) throw ValidationError("sweep needs at least one value");
    if (cfg.seeds.empty()) throw ValidationError("sweep needs at least one seed");
    for (double v : values) check_value(axis, v);
    cfg.validate();

    // Data is loaded per seed up front; a seed whose data fails marks all its cells.
    std::vector<std::optional<SweepData>> per_seed(cfg.seeds.size());
    std::vector<std::string> seed_errors(cfg.seeds.size());
    std::vector<std::exception_ptr> seed_failures(cfg.seeds.size());
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        try {
            per_seed[s] = data(cfg.seeds[s]);
        } catch (const std::exception& e) {
            seed_errors[s] = e.what();
            seed_failures[s] = std::current_exception();
        }
    }

    std::vector<SweepCell> cells;
    for (double v : values)
        for (auto seed : cfg.seeds) cells.push_back({axis, v, seed, std::nullopt, {}, nullptr});

    parallel_for(cells.size(), cfg.parallelism, [&](std::size_t c) {
        SweepCell& cell = cells[c];
        const std::size_t s = c % cfg.seeds.size();
        if (!per_seed[s]) {
            cell.error = seed_errors[s];
            cell.failure = seed_failures[s];
            return;
        }
        try {
            cell.report = run_cell(axis, cell.value, cell.seed, cfg, *per_seed[s]);
        } catch (const std::exception& e) {
            cell.error = e.what();
            cell.failure = std::current_exception();
        }
    });
    return cells;
}

SweepDataSource file_sweep_source(const ExperimentConfig& cfg, const std::filesystem::path& ood_path) {
    cfg.validate_paths();
    std::optional<Corpus> ood;
    if (!ood_path.empty()) ood = normalize(load_jsonl(ood_path));
    return [cfg, ood](std::int64_t seed) {
        ExperimentData d = load_experiment_data(cfg, seed);
        return SweepData{std::move(d.test), std::move(d.pool), ood};
    };
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
    out << "axis,value,seed,accuracy,predictor_calls,cache_hits,token_estimate,wall_time_seconds\n";
    for (const auto& c : cells) {
        out << to_string(c.axis) << ',' << format_number(c.value) << ',' << c.seed << ',';
        if (c.report) {
            const RunReport& r = *c.report;
            out << format_number(r.accuracy) << ',' << r.predictor_calls << ',' << r.cache_hits << ','
                << r.token_estimate << ',' << format_number(r.wall_time_seconds);
        } else {
            out << ",,,,";
        }
        out << '\n';
    }
}

}  // namespace nuc
