#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "bayesgeom/estimators.hpp"

namespace bayesgeom {

/// 17 significant digits, '.' decimal separator; "nan", "inf", "-inf" for
/// non-finite values.
std::string format_double(double x);

/// Non-finite doubles are stored as JSON strings ("nan", "inf", "-inf") so a
/// written report re-reads bit-exactly.
nlohmann::json to_json(const CompatReport& r);
CompatReport report_from_json(const nlohmann::json& j);

void write_report_json(const std::string& path, const CompatReport& r);
CompatReport read_report_json(const std::string& path);

/// Simple column table; cells are strings or doubles, written as CSV with LF
/// line endings.
class Table {
 public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    struct Cell {
        Cell(double v) : is_number(true), number(v) {}
        Cell(std::string s) : text(std::move(s)) {}
        Cell(const char* s) : text(s) {}
        bool is_number = false;
        double number = 0.0;
        std::string text;
    };

    void add_row(std::vector<Cell> row);
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
    std::size_t column_index(const std::string& name) const;

    std::string to_csv() const;
    void write_csv(const std::string& path) const;

 private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

void write_text(const std::string& path, const std::string& content);

}  // namespace bayesgeom
