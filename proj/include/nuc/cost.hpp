#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace nuc {

std::size_t whitespace_tokens(std::string_view text);

/// Token and dollar estimates for prompt traffic. Tokens per call are
/// ceil(whitespace tokens x inflation).
struct CostModel {
    double token_inflation = 1.3;
    double price_per_1k_tokens = 0.00015;

    std::uint64_t prompt_tokens(std::string_view prompt) const;
    double cost(std::uint64_t tokens) const { return static_cast<double>(tokens) / 1000.0 * price_per_1k_tokens; }
};

}  // namespace nuc
