#pragma once

#include "nuc/corpus.hpp"
#include "nuc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace nuc {

/// dot(a, b) / (|a| |b|), accumulated in double.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size())
        throw ValidationError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    const auto ad = a.template cast<double>().eval();
    const auto bd = b.template cast<double>().eval();
    const double na = ad.norm();
    const double nb = bd.norm();
    if (na == 0.0 || nb == 0.0) throw ValidationError("cosine similarity of a zero vector");
    return std::clamp(ad.dot(bd) / (na * nb), -1.0, 1.0);
}

/// Marks the anchor's own slot in a neighborhood that includes it.
inline constexpr std::size_t kAnchorSlot = std::numeric_limits<std::size_t>::max();

struct Neighborhood {
    std::string anchor_id;
    // Pool indices in rank order; kAnchorSlot stands for the anchor itself.
    std::vector<std::size_t> indices;
    // Cosine similarity to the anchor, non-increasing.
    std::vector<double> similarities;

    std::size_t size() const noexcept { return indices.size(); }
    bool includes_anchor() const noexcept { return !indices.empty() && indices.front() == kAnchorSlot; }
};

struct SearchOptions {
    bool include_anchor = false;
    // Pool index to skip, used when the anchor is itself a pool member.
    std::optional<std::size_t> exclude = std::nullopt;
};

/// Exact cosine search over a fixed pool. Rows are L2-normalized on
/// construction; ranking is by similarity descending with ties broken by
/// ascending pool index.
template <typename Scalar>
class FlatIndex {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    FlatIndex() = default;

    explicit FlatIndex(const Corpus& pool) {
        if (!pool.empty() && !pool.fully_embedded()) throw ValidationError("pool has unembedded examples");
        const auto d = static_cast<Eigen::Index>(pool.dimension().value_or(0));
        rows_.resize(static_cast<Eigen::Index>(pool.size()), d);
        for (std::size_t i = 0; i < pool.size(); ++i) rows_.row(static_cast<Eigen::Index>(i)) = unit(*pool[i].embedding, pool[i].id);
    }

    explicit FlatIndex(Matrix rows) : rows_(std::move(rows)) {
        for (Eigen::Index i = 0; i < rows_.rows(); ++i) rows_.row(i) = unit(rows_.row(i).transpose(), std::to_string(i));
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
    const Matrix& rows() const noexcept { return rows_; }

    /// Cosine similarity of `query` to every pool row.
    template <typename Derived>
    Eigen::VectorXd similarities(const Eigen::MatrixBase<Derived>& query) const {
        if (static_cast<std::size_t>(query.size()) != dimension())
            throw ValidationError("query dimension " + std::to_string(query.size()) + " does not match pool dimension " +
                                  std::to_string(dimension()));
        const Vector q = unit(query, "query");
        Eigen::VectorXd sims(rows_.rows());
        for (Eigen::Index i = 0; i < rows_.rows(); ++i)
            sims[i] = std::clamp(static_cast<double>(rows_.row(i).dot(q.transpose())), -1.0, 1.0);
        return sims;
    }

    template <typename Derived>
    Neighborhood search(std::string anchor_id, const Eigen::MatrixBase<Derived>& query, std::size_t k,
                        const SearchOptions& opts = {}) const {
        if (k == 0) throw ValidationError("k must be positive");
        const bool skip = opts.exclude && *opts.exclude < size();
        const std::size_t available = size() - (skip ? 1 : 0) + (opts.include_anchor ? 1 : 0);
        if (k > available)
            throw ValidationError("k = " + std::to_string(k) + " exceeds the " + std::to_string(available) +
                                  " available candidates");

        Neighborhood out;
        out.anchor_id = std::move(anchor_id);
        out.indices.reserve(k);
        out.similarities.reserve(k);
        if (opts.include_anchor) {
            out.indices.push_back(kAnchorSlot);
            out.similarities.push_back(1.0);
        }
        const std::size_t want = k - out.indices.size();
        if (want == 0) {
            // still validate the query
            (void)unit(query, out.anchor_id);
            return out;
        }

        const Eigen::VectorXd sims = similarities(query);
        std::vector<std::size_t> order;
        order.reserve(size());
        for (std::size_t i = 0; i < size(); ++i)
            if (!(skip && i == *opts.exclude)) order.push_back(i);
        auto better = [&](std::size_t a, std::size_t b) {
            const double sa = sims[static_cast<Eigen::Index>(a)];
            const double sb = sims[static_cast<Eigen::Index>(b)];
            return sa != sb ? sa > sb : a < b;
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(want), order.end(), better);
        for (std::size_t r = 0; r < want; ++r) {
            out.indices.push_back(order[r]);
            out.similarities.push_back(sims[static_cast<Eigen::Index>(order[r])]);
        }
        return out;
    }

private:
    template <typename Derived>
    static Vector unit(const Eigen::MatrixBase<Derived>& v, const std::string& who) {
        const Vector x = v.template cast<Scalar>();
        const Scalar n = x.norm();
        if (n == Scalar(0)) throw ValidationError("example '" + who + "' has a zero-vector embedding");
        return x / n;
    }

    Matrix rows_;
};

using EmbeddingIndex = FlatIndex<double>;

/// Top-k neighbors of `anchor` in `pool`. With `include_anchor` the anchor takes
/// rank 1 at similarity 1.0 and the remaining k-1 slots come from the pool.
Neighborhood top_k(const Example& anchor, const Corpus& pool, std::size_t k, bool include_anchor);
Neighborhood top_k(const Example& anchor, const EmbeddingIndex& index, std::size_t k, bool include_anchor);

}  // namespace nuc
