#pragma once

// Brute-force reference implementations. They share no code with the library:
// scores are kept as integers where the inputs allow it, similarities are
// computed in long double with plain loops, and rankings use a full sort.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

enum class Strategy { naive, weighted, weighted_confidence, filtered };

// A vote whose weight is w4/4 and whose confidence is c5/5.
struct IntVote {
    std::string label;
    int w4;
    int c5;
};

// Winning label for integer-scaled votes. Scores: count, sum w4, sum w4*c5, or
// sum w4 over votes with c5 >= 5*theta. Ties: larger sum of w4, then the
// lexicographically smaller label. No admissible vote -> the first vote's label.
inline std::string tally(const std::vector<IntVote>& votes, Strategy s, double theta = 0.0) {
    std::map<std::string, std::pair<long long, long long>> score_weight;
    for (const auto& v : votes) {
        if (s == Strategy::filtered && static_cast<double>(v.c5) / 5.0 < theta) continue;
        long long score = 0;
        switch (s) {
            case Strategy::naive: score = 1; break;
            case Strategy::weighted:
            case Strategy::filtered: score = v.w4; break;
            case Strategy::weighted_confidence: score = static_cast<long long>(v.w4) * v.c5; break;
        }
        auto& sw = score_weight[v.label];
        sw.first += score;
        sw.second += v.w4;
    }
    if (score_weight.empty()) return votes.front().label;
    std::string best;
    std::pair<long long, long long> best_sw{-1, -1};
    for (const auto& [label, sw] : score_weight) {
        if (sw.first > best_sw.first || (sw.first == best_sw.first && sw.second > best_sw.second)) {
            best = label;
            best_sw = sw;
        }
    }
    return best;
}

// argmax_y sum_j w_j [y_j = y], evaluated directly, with a caller-chosen
// weight per vote. Ties go to the lexicographically smallest label.
inline std::string weighted_argmax(const std::vector<std::string>& labels, const std::vector<double>& weights) {
    std::vector<std::string> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::string best;
    long double best_score = -1.0L;
    for (const auto& y : distinct) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < labels.size(); ++j)
            if (labels[j] == y) s += weights[j];
        if (s > best_score + 1e-12L) {
            best = y;
            best_score = s;
        }
    }
    return best;
}

inline long double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    long double dot = 0.0L, na = 0.0L, nb = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    return dot / std::sqrt(na * nb);
}

struct Ranked {
    std::size_t index;
    long double similarity;
};

// Every pool row except `skip`, sorted by similarity descending then index.
inline std::vector<Ranked> full_ranking(const std::vector<std::vector<float>>& pool, const std::vector<float>& query,
                                        std::optional<std::size_t> skip = std::nullopt) {
    std::vector<Ranked> all;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!skip || *skip != i) all.push_back({i, cosine(pool[i], query)});
    std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.index < b.index;
    });
    return all;
}

// Mean over anchors of the share of the k nearest non-self neighbors that
// carry the anchor's label.
inline double purity(const std::vector<std::vector<float>>& points, const std::vector<std::string>& labels,
                     std::size_t k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto ranking = full_ranking(points, points[i], i);
        std::size_t same = 0;
        for (std::size_t r = 0; r < k; ++r)
            if (labels[ranking[r].index] == labels[i]) ++same;
        total += static_cast<double>(same) / static_cast<double>(k);
    }
    return total / static_cast<double>(points.size());
}

}  // namespace oracle
