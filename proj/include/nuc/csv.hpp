#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace nuc {

// RFC 4180 quoting, only when needed.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Shortest round-trip representation; whole numbers never use an exponent.
inline std::string format_number(double x) {
    char buf[32];
    const bool whole = x > -1e15 && x < 1e15 && x == static_cast<double>(static_cast<long long>(x));
    auto [end, ec] = whole ? std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(x))
                           : std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace nuc
