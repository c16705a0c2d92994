#pragma once

#include <charconv>
#include <string>

namespace rwb {

/// Shortest round-trip decimal form, so identical doubles always print
/// identically.
inline std::string format_double(double x)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace rwb
