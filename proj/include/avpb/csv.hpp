#pragma once

#include <string>
#include <vector>

namespace avpb::csv {

// "%.12g" with a '.' decimal separator regardless of locale.
std::string format(double x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // empty cells parse as NaN

    // Column index by exact header name, -1 if absent.
    int column(const std::string& name) const;
    // Indices of columns name0, name1, ... (a vector-valued column group).
    std::vector<int> column_group(const std::string& prefix) const;
};

// Throws std::runtime_error on unreadable files, std::invalid_argument on
// malformed numeric cells.
Table read_file(const std::string& path);

}  // namespace avpb::csv
