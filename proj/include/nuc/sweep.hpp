#pragma once

#include "nuc/pipeline.hpp"

#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nuc {

enum class SweepAxis { k_neighbors, pool_size, ood_ratio, theta };
std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepData {
    Corpus test;
    Corpus pool;
    // Required by the ood_ratio axis.
    std::optional<Corpus> ood_source;
};

// Supplies the data for one seed. Called once per seed.
using SweepDataSource = std::function<SweepData(std::int64_t seed)>;

struct SweepCell {
    SweepAxis axis{};
    double value = 0.0;
    std::int64_t seed = 0;
    std::optional<RunReport> report;
    std::string error;  // set when the cell failed
    std::exception_ptr failure;
};

/// Runs one experiment per (value, seed) with `cfg` adjusted along `axis`.
/// Cells run in parallel (cfg.parallelism), each single-threaded, and come back
/// in value-major, seed-minor order. A failing cell records its error and the
/// sweep continues.
///
/// pool_size keeps a seeded random subset of the pool; ood_ratio injects OOD
/// examples from the data source's ood_source.
std::vector<SweepCell> run_sweep(SweepAxis axis, std::span<const double> values, const ExperimentConfig& cfg,
                                 const SweepDataSource& data);

/// Data source reading the files configured in `cfg`, plus an optional OOD file.
SweepDataSource file_sweep_source(const ExperimentConfig& cfg, const std::filesystem::path& ood_path = {});

/// Long format: axis,value,seed,accuracy,predictor_calls,cache_hits,
/// token_estimate,wall_time_seconds. Failed cells leave the metrics empty.
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);

}  // namespace nuc
