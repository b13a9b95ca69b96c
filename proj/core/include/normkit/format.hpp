#pragma once

#include <string>
#include <string_view>

namespace normkit {

/// Fixed four-decimal rendering, e.g. 0.4651 or 1.0000.
std::string format_fixed4(double value);

/// Four-decimal rounding with trailing zeros (and a bare point) removed:
/// 0.7600 -> "0.76", 1.0000 -> "1".
std::string format_trimmed4(double value);

/// Shortest text that parses back to exactly `value`.
std::string format_exact(double value);

/// Parses a full decimal number; returns false on any trailing garbage.
bool parse_double(std::string_view text, double& out);

}  // namespace normkit
