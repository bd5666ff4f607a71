#pragma once

#include <string>
#include <string_view>

namespace vistra {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict full-string parse; throws std::invalid_argument.
double parse_double(std::string_view s);

}  // namespace vistra
