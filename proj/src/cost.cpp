#include "nuc/cost.hpp"

#include <cctype>
#include <cmath>

namespace nuc {

std::size_t whitespace_tokens(std::string_view text) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++n;
        in_token = !space;
    }
    return n;
}

std::uint64_t CostModel::prompt_tokens(std::string_view prompt) const {
    // 10 * 1.3 is 13.000000000000002 in binary floating point
    const double scaled = static_cast<double>(whitespace_tokens(prompt)) * token_inflation;
    return static_cast<std::uint64_t>(std::ceil(scaled - 1e-9));
}

}  // namespace nuc
