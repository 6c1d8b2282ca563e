#pragma once

#include <string>

namespace shepeaks::csv {

/// Shortest round-trip decimal form of x, independent of the global locale.
/// Non-finite values print as "nan", "inf" and "-inf".
std::string format_number(double x);

}  // namespace shepeaks::csv
