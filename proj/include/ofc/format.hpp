#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ofc {

/// Shortest decimal text that parses back to exactly `v`.
std::string to_text(double v);

/// Fixed-point with `decimals` digits after the point.
std::string to_fixed(double v, int decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace ofc
