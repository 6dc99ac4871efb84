#include "nuc/aggregation.hpp"

#include "nuc/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nuc {

namespace {

enum class Score { count, weight, weight_times_confidence };

struct LabelTally {
    std::vector<double> scores;
    std::vector<double> weights;
};

double canonical_sum(std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

void check_vote(const Vote& v) {
    if (!(v.weight >= 0.0) || !std::isfinite(v.weight))
        throw ValidationError("vote weight must be a finite non-negative number");
    if (!(v.confidence >= 0.0 && v.confidence <= 1.0)) throw ValidationError("vote confidence must be in [0, 1]");
}

bool counts(const Vote& v) { return v.admitted && v.weight > 0.0 && !v.label.empty(); }

// Empty label means no vote counted.
VoteOutcome tally(std::span<const Vote> votes, Score score, double theta) {
    std::map<std::string, LabelTally> by_label;
    for (const Vote& v : votes) {
        check_vote(v);
        if (!counts(v)) continue;
        if (!v.gate_exempt && v.confidence < theta) continue;
        auto& t = by_label[v.label];
        switch (score) {
            case Score::count: t.scores.push_back(1.0); break;
            case Score::weight: t.scores.push_back(v.weight); break;
            case Score::weight_times_confidence: t.scores.push_back(v.weight * v.confidence); break;
        }
        t.weights.push_back(v.weight);
    }

    VoteOutcome out;
    double best_score = 0.0;
    double best_weight = 0.0;
    // std::map iterates labels in ascending order, so the lexicographic
    // tie-break falls out of keeping the first of equal candidates.
    for (auto& [label, t] : by_label) {
        const double s = canonical_sum(t.scores);
        const double w = canonical_sum(t.weights);
        out.total_tally += s;
        const bool better = out.label.empty() || (!near(s, best_score) && s > best_score) ||
                            (near(s, best_score) && !near(w, best_weight) && w > best_weight);
        if (better) {
            out.label = label;
            best_score = s;
            best_weight = w;
        }
    }
    out.winning_tally = best_score;
    return out;
}

VoteOutcome fallback(const Vote& anchor_vote) {
    VoteOutcome out;
    out.label = anchor_vote.label;
    out.fallback = true;
    out.fallback_confidence = anchor_vote.confidence;
    return out;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::naive: return "naive";
        case PolicyKind::weighted_distance: return "weighted_distance";
        case PolicyKind::weighted_distance_confidence: return "weighted_distance_confidence";
        case PolicyKind::filtered_weighted: return "filtered_weighted";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
    for (auto k : {PolicyKind::naive, PolicyKind::weighted_distance, PolicyKind::weighted_distance_confidence,
                   PolicyKind::filtered_weighted})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown aggregation policy '" + std::string(name) +
                          "' (expected naive, weighted_distance, weighted_distance_confidence or filtered_weighted)");
}

void AggregationPolicy::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta must be in [0, 1]");
}

double VoteOutcome::confidence() const {
    if (fallback) return fallback_confidence;
    return total_tally > 0.0 ? winning_tally / total_tally : 0.0;
}

std::string naive_majority(std::span<const Vote> votes) {
    VoteOutcome out = tally(votes, Score::count, 0.0);
    if (out.label.empty()) throw ValidationError("no admissible votes");
    return out.label;
}

std::string weighted_majority(std::span<const Vote> votes, bool use_confidence) {
    VoteOutcome out = tally(votes, use_confidence ? Score::weight_times_confidence : Score::weight, 0.0);
    if (out.label.empty()) throw ValidationError("no admissible votes");
    return out.label;
}

std::string filtered_weighted_majority(std::span<const Vote> votes, double theta, const Vote& anchor_vote) {
    AggregationPolicy{PolicyKind::filtered_weighted, theta}.validate();
    VoteOutcome out = tally(votes, Score::weight, theta);
    return out.label.empty() ? anchor_vote.label : out.label;
}

VoteOutcome aggregate(std::span<const Vote> votes, const AggregationPolicy& policy, const Vote& anchor_vote) {
    policy.validate();
    VoteOutcome out;
    switch (policy.kind) {
        case PolicyKind::naive: out = tally(votes, Score::count, 0.0); break;
        case PolicyKind::weighted_distance: out = tally(votes, Score::weight, 0.0); break;
        case PolicyKind::weighted_distance_confidence: out = tally(votes, Score::weight_times_confidence, 0.0); break;
        case PolicyKind::filtered_weighted: out = tally(votes, Score::weight, policy.theta); break;
    }
    return out.label.empty() ? fallback(anchor_vote) : out;
}

}  // namespace nuc
