#pragma once

#include <string>
#include <vector>

namespace bubble {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // excludes the header row
};

/// Read a comma-separated file with a header row. Fields are trimmed of
/// surrounding whitespace; lines starting with '#' are skipped.
CsvTable read_csv_table(const std::string& path);

/// Shortest representation that still round-trips a double through strtod.
std::string format_double(double v);

/// Fixed-precision %g formatting for presentation output.
std::string format_double(double v, int significant_digits);

}  // namespace bubble
