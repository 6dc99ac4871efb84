#include "nuc/response_parser.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace nuc {

namespace {

bool is_word(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool matches_at(std::string_view raw, std::size_t pos, std::string_view label) {
    if (label.empty() || pos + label.size() > raw.size()) return false;
    for (std::size_t i = 0; i < label.size(); ++i)
        if (lower(raw[pos + i]) != lower(label[i])) return false;
    if (pos > 0 && is_word(raw[pos - 1]) && is_word(label.front())) return false;
    const std::size_t end = pos + label.size();
    if (end < raw.size() && is_word(raw[end]) && is_word(label.back())) return false;
    return true;
}

std::optional<double> first_unit_number(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const bool starts = is_digit(s[i]) || (s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1]));
        if (!starts || (i > 0 && (is_word(s[i - 1]) || s[i - 1] == '.'))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && is_digit(s[j])) ++j;
        if (j < s.size() && s[j] == '.') {
            ++j;
            while (j < s.size() && is_digit(s[j])) ++j;
        }
        const bool negative = i > 0 && s[i - 1] == '-';
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, value);
        const bool percent = j < s.size() && s[j] == '%';
        if (ec == std::errc{} && ptr == s.data() + j && !negative && !percent && value >= 0.0 && value <= 1.0)
            return value;
        i = j;
    }
    return std::nullopt;
}

}  // namespace

Prediction parse_response(std::string_view raw, const std::vector<std::string>& label_space) {
    Prediction out;
    out.raw = std::string(raw);
    out.source = PredictionSource::remote;

    std::size_t best_pos = raw.size();
    const std::string* best = nullptr;
    for (std::size_t pos = 0; pos < raw.size() && !best; ++pos) {
        for (const auto& label : label_space) {
            if (matches_at(raw, pos, label) && (!best || label.size() > best->size())) {
                best = &label;
                best_pos = pos;
            }
        }
    }
    if (!best) return Prediction::invalid(std::string(raw), PredictionSource::remote);

    out.label = *best;
    if (auto conf = first_unit_number(raw.substr(best_pos + best->size()))) {
        out.confidence = *conf;
    } else {
        out.confidence = 0.5;
        out.confidence_defaulted = true;
    }
    return out;
}

}  // namespace nuc
