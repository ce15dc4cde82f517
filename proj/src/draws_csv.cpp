#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bayesgeom/report.hpp"
#include "bayesgeom/sampling.hpp"

namespace bayesgeom {

void write_draws_csv(const std::string& path, const Draws& draws, const std::vector<std::string>& names) {
    if (names.size() != draws.dim()) {
        throw std::invalid_argument("write_draws_csv: need one column name per coordinate");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_draws_csv: cannot open " + path);
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const auto row = draws.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_draws_csv: write failed for " + path);
}

Draws read_draws_csv(const std::string& path, std::vector<std::string>* names) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_draws_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_draws_csv: empty file " + path);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.empty()) throw std::runtime_error("read_draws_csv: missing header in " + path);
    std::vector<double> data;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw std::runtime_error("read_draws_csv: bad number '" + cell + "' on line " +
                                         std::to_string(lineno));
            }
            data.push_back(v);
            ++cols;
        }
        if (cols != header.size()) {
            throw std::runtime_error("read_draws_csv: line " + std::to_string(lineno) + " has " +
                                     std::to_string(cols) + " columns, header has " +
                                     std::to_string(header.size()));
        }
    }
    if (names) *names = header;
    return Draws(header.size(), std::move(data));
}

}  // namespace bayesgeom
