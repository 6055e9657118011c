#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gapminer::csv {

/// Quotes a field when it contains a delimiter, quote or line break.
std::string escape(std::string_view field);

/// Writes one comma-separated record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one record. Quoted fields may contain commas and doubled quotes;
/// embedded newlines are not supported.
std::vector<std::string> split_row(std::string_view line);

/// Shortest representation that round-trips through strtod.
std::string format_real(double value);

/// Empty string for a missing value.
std::string format_optional(const std::optional<double>& value);

}  // namespace gapminer::csv
