#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scout::text {

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

// Strict numeric parsing of the whole field; return false on any trailing
// junk, empty input, or out-of-range values.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, long long& out);
bool parse_u64(std::string_view field, std::uint64_t& out);

// Shortest representation that parses back to the identical double.
std::string format_double(double value);

}  // namespace scout::text
