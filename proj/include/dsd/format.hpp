#pragma once

#include <string>

namespace dsd {

/// Decimal text that parses back to the same double (%.17g).
std::string format_exact(double v);

/// Nine significant digits, the CSV convention.
std::string format_csv(double v);

}  // namespace dsd
