#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace erep {

// Shortest round-trip decimal representation of a double (std::to_chars).
// Used for every number we serialize so that write -> read -> write is
// byte-stable and bit-exact.
std::string format_double(double v);

// Strict full-token parse; throws DataError mentioning `context` on failure.
double parse_double(std::string_view token, const std::string& context);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char delim);

}  // namespace erep
