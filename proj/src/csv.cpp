#include "avpb/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "avpb/numeric.hpp"

namespace avpb::csv {

std::string format(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> Table::column_group(const std::string& prefix) const {
    std::vector<int> cols;
    for (std::size_t k = 0;; ++k) {
        const int c = column(prefix + std::to_string(k));
        if (c < 0) break;
        cols.push_back(c);
    }
    return cols;
}

Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (first) {
            table.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row(table.header.size(), kNaN);
        for (std::size_t i = 0; i < cells.size() && i < row.size(); ++i) {
            // trim spaces
            std::string s = cells[i];
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
            if (s.empty()) continue;
            try {
                std::size_t pos = 0;
                row[i] = std::stod(s, &pos);
                if (pos != s.size()) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad numeric cell '" + cells[i] + "' in " + path);
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (first) throw std::runtime_error("empty CSV " + path);
    return table;
}

}  // namespace avpb::csv
