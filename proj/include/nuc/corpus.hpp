#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nuc {

// Embeddings are kept at the same 32-bit precision they are stored with on disk.
using Embedding = Eigen::VectorXf;

// Reserved gold label for out-of-distribution pool members. It is never part of a
// label space and never a valid prediction.
inline constexpr std::string_view kOodLabel = "__ood__";

struct Example {
    std::string id;
    std::string text;
    std::optional<std::string> gold_label;
    std::optional<Embedding> embedding;
};

/// An ordered, validated collection of examples sharing one label space and one
/// embedding dimension. Immutable once constructed; transformations return new
/// corpora.
class Corpus {
public:
    Corpus() = default;

    /// Validates every invariant (unique non-empty ids, non-empty text, labels in
    /// the label space, consistent dimension). When `label_space` is empty it is
    /// inferred as the sorted set of observed labels.
    explicit Corpus(std::vector<Example> examples, std::vector<std::string> label_space = {});

    const std::vector<Example>& examples() const noexcept { return examples_; }
    const std::vector<std::string>& label_space() const noexcept { return label_space_; }
    std::optional<std::size_t> dimension() const noexcept { return dimension_; }

    std::size_t size() const noexcept { return examples_.size(); }
    bool empty() const noexcept { return examples_.empty(); }
    const Example& operator[](std::size_t i) const { return examples_[i]; }

    auto begin() const noexcept { return examples_.begin(); }
    auto end() const noexcept { return examples_.end(); }

    bool fully_embedded() const noexcept;
    bool fully_labeled() const noexcept;
    bool has_label(std::string_view label) const;
    std::optional<std::size_t> find(std::string_view id) const;

private:
    std::vector<Example> examples_;
    std::vector<std::string> label_space_;
    std::optional<std::size_t> dimension_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Reads one JSON object per line: {"id", "text", "label"?, "embedding"?}.
/// Blank lines are skipped. Errors carry the 1-based line number.
Corpus load_jsonl(const std::filesystem::path& path,
                  std::optional<std::vector<std::string>> label_space = std::nullopt);
Corpus parse_jsonl(std::istream& in,
                   std::optional<std::vector<std::string>> label_space = std::nullopt);

std::string to_jsonl_line(const Example& example);
void write_jsonl(std::ostream& out, const Corpus& corpus);
void save_jsonl(const std::filesystem::path& path, const Corpus& corpus);

/// Returns `v / |v|`. Vectors already within 1e-6 of unit length are returned
/// unchanged, which makes repeated normalization exact.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
normalized_embedding(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    const double norm = v.template cast<double>().norm();
    if (std::abs(norm - 1.0) <= 1e-6) return v;
    return (v.template cast<double>() / norm).template cast<Scalar>();
}

/// L2-normalizes every embedding. Throws ValidationError naming the first example
/// that is unembedded or has a zero vector.
Corpus normalize(const Corpus& corpus);

/// Examples at `indices`, in that order, with the label space preserved.
Corpus subset(const Corpus& corpus, std::span<const std::size_t> indices);

struct Split {
    Corpus test;
    Corpus pool;
};

/// Seeded shuffle, first `test_size` examples become the test set and the rest
/// the retrieval pool. Both keep the source label space.
Split split_test_pool(const Corpus& corpus, std::size_t test_size, std::uint64_t seed);

}  // namespace nuc
