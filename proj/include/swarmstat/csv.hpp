#pragma once

#include <optional>
#include <string>
#include <vector>

namespace swarmstat::csv {

struct Table {
    std::vector<std::string> header; // empty when the file has no header row
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const; // throws DomainError if absent
};

/// Reads a comma-separated file. Cells are trimmed; empty cells stay empty.
Table read_file(const std::string& path, bool has_header);
Table parse(const std::string& text, bool has_header);

/// Empty or whitespace-only cells parse as nullopt.
std::optional<double> to_number(const std::string& cell);

/// Serializes a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Writes text to path atomically (write temp, then rename).
void write_file_atomic(const std::string& path, const std::string& text);

} // namespace swarmstat::csv
