#pragma once

#include <string>
#include <string_view>

namespace cycip {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict parse of a whole token; throws std::invalid_argument otherwise.
/// Accepts "inf", "-inf" and "nan" as produced by format_double.
double parse_double(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace cycip
