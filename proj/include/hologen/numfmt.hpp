#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace hologen {
namespace detail {

// Shortest decimal that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad numeric field '" + s + "'");
    return v;
}

} // namespace detail
} // namespace hologen
