#pragma once

#include <string>

namespace ergopipe::csv {

// Shortest decimal that round-trips the double; "inf"/"nan" for
// non-finite values. Keeps CSV output byte-stable across runs.
std::string format_double(double value);

std::string format_int(long long value);

}  // namespace ergopipe::csv
