#include "bayesgeom/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bayesgeom {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("report: expected a number, got " + j.dump());
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

json to_json(const CompatReport& r) {
    json j;
    j["model"] = r.model;
    j["method"] = r.method;
    j["posterior_draws"] = r.posterior_draws;
    j["prior_draws"] = r.prior_draws;
    j["seed"] = r.seed;
    json values = json::object();
    for (const auto& [k, v] : r.values) values[k] = number(v);
    j["values"] = values;
    json est = json::object();
    for (const auto& [k, e] : r.estimates) {
        est[k] = {{"value", number(e.value)}, {"mc_se", number(e.mc_se)}, {"ess", number(e.ess)},
                  {"ok", e.ok},              {"error", e.error},          {"warnings", e.warnings}};
    }
    j["estimates"] = est;
    j["notes"] = r.notes;
    return j;
}

CompatReport report_from_json(const json& j) {
    CompatReport r;
    r.model = j.value("model", "");
    r.method = j.value("method", "");
    r.posterior_draws = j.value("posterior_draws", std::size_t{0});
    r.prior_draws = j.value("prior_draws", std::size_t{0});
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("values")) {
        for (const auto& [k, v] : j.at("values").items()) r.values[k] = read_number(v);
    }
    if (j.contains("estimates")) {
        for (const auto& [k, v] : j.at("estimates").items()) {
            Estimate e;
            e.value = read_number(v.at("value"));
            e.mc_se = read_number(v.at("mc_se"));
            e.ess = read_number(v.at("ess"));
            e.ok = v.value("ok", false);
            e.error = v.value("error", "");
            e.warnings = v.value("warnings", std::vector<std::string>{});
            r.estimates[k] = std::move(e);
        }
    }
    r.notes = j.value("notes", std::vector<std::string>{});
    return r;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_report_json(const std::string& path, const CompatReport& r) {
    write_text(path, to_json(r).dump(2) + "\n");
}

CompatReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return report_from_json(json::parse(in));
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("Table::add_row: wrong number of cells");
    rows_.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] == name) return i;
    }
    throw std::out_of_range("Table: no column " + name);
}

std::string Table::to_csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << csv_escape(columns_[i]);
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << (row[i].is_number ? format_double(row[i].number) : csv_escape(row[i].text));
        }
        out << '\n';
    }
    return out.str();
}

void Table::write_csv(const std::string& path) const { write_text(path, to_csv()); }

}  // namespace bayesgeom
