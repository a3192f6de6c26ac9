#pragma once

#include <string>
#include <vector>

namespace blochcav {

/// Shortest-independent fixed form: 17 significant digits, '.' decimal point, no locale.
std::string format_number(double value);

/// Joins already-formatted cells with ',' and appends '\n'.
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace blochcav
