#pragma once

#include <string>

namespace ahi {

/// Shortest "%.10g" rendering of a double; "nan", "inf", "-inf" for
/// non-finite values.
std::string format_number(double value);

}  // namespace ahi
