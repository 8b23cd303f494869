#pragma once

#include <string>
#include <string_view>

namespace radbif {

/// Shortest round-trip decimal form of a double ("nan", "inf" for non-finite).
std::string format_double(double value);

/// Strict full-string parse; throws Errc::InvalidArgument naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);

}  // namespace radbif
