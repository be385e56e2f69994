#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace irrsel {

/// Shortest decimal text that parses back to the same double.
inline std::string format_shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Fixed-point text with `digits` decimals.
inline std::string format_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1); // no "-0.00"
    return s;
}

} // namespace irrsel
