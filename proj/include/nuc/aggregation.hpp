#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nuc {

struct Vote {
    std::string label;
    double weight = 1.0;      // similarity to the anchor, >= 0
    double confidence = 1.0;  // in [0, 1]
    bool admitted = true;
    // Passes the confidence gate regardless of its confidence.
    bool gate_exempt = false;
};

enum class PolicyKind { naive, weighted_distance, weighted_distance_confidence, filtered_weighted };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

struct AggregationPolicy {
    PolicyKind kind = PolicyKind::filtered_weighted;
    double theta = 0.7;
    // Exempt the anchor's own vote from the confidence gate.
    bool always_admit_anchor = false;

    void validate() const;
};

struct VoteOutcome {
    std::string label;  // empty when the fallback vote had no label
    double winning_tally = 0.0;
    double total_tally = 0.0;
    bool fallback = false;
    double fallback_confidence = 0.0;

    /// Winning tally share, or the anchor vote's confidence for a fallback
    /// decision; 0 when the tally is zero.
    double confidence() const;
};

// Votes that are not admitted or carry zero weight are ignored by every
// strategy. Ties on the tally (relative tolerance 1e-12) go to the label with
// the larger total similarity weight, then to the lexicographically smaller
// label. Tallies are summed in a canonical order so the result does not depend
// on the order of `votes`.

/// Most frequent label. Throws ValidationError when no vote counts.
std::string naive_majority(std::span<const Vote> votes);

/// argmax of the summed weight (times confidence when `use_confidence`).
/// Throws ValidationError when no vote counts or a weight is negative.
std::string weighted_majority(std::span<const Vote> votes, bool use_confidence);

/// Similarity-weighted vote over the votes with confidence >= theta. Returns
/// `anchor_vote.label` when nothing passes the gate.
std::string filtered_weighted_majority(std::span<const Vote> votes, double theta, const Vote& anchor_vote);

/// Applies `policy`. When no vote counts, every strategy falls back to the
/// anchor's own label.
VoteOutcome aggregate(std::span<const Vote> votes, const AggregationPolicy& policy, const Vote& anchor_vote);

}  // namespace nuc
