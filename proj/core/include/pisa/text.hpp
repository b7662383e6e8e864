#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pisa {

// Shortest round-trip decimal form via std::to_chars. Used for every number
// that ends up in a file so that identical values always serialize to
// identical bytes.
std::string format_double(double v);

std::string format_int(long long v);
std::string format_uint(unsigned long long v);

// Strict parsers: the whole string must be consumed. Throw ValidationError.
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);
unsigned long long parse_uint(std::string_view s, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace pisa
