#pragma once

#include "nuc/prediction.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace nuc {

/// Hex SHA-256 over (model identity, prompt, temperature, top_p). Repeated
/// samples of the same prompt use `draw` > 0, which is folded into the hash so
/// that each draw gets its own entry; draw 0 hashes only the four fields.
std::string prompt_fingerprint(std::string_view model, std::string_view prompt, double temperature, double top_p,
                               std::uint32_t draw = 0);

/// Thread-safe map from prompt fingerprint to prediction, optionally backed by
/// an append-only JSONL journal of {"fp","label","conf","raw"} records.
///
/// The first value stored for a key wins; later puts for the same key are
/// ignored. Opening a journal compacts it (first record per key, torn trailing
/// lines dropped) and then appends every new entry.
class PredictionCache {
public:
    PredictionCache() = default;
    explicit PredictionCache(const std::filesystem::path& journal);

    PredictionCache(const PredictionCache&) = delete;
    PredictionCache& operator=(const PredictionCache&) = delete;

    /// Stored prediction with source set to cache.
    std::optional<Prediction> get(const std::string& fingerprint) const;

    /// Returns false when the key was already present.
    bool put(const std::string& fingerprint, const Prediction& prediction);

    std::size_t size() const;
    std::optional<std::filesystem::path> journal_path() const { return path_; }

private:
    struct Entry {
        std::string label;
        double confidence;
        std::string raw;
    };

    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;
    std::optional<std::filesystem::path> path_;
    std::ofstream journal_;
};

}  // namespace nuc
