#include "report.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "lvim/errors.hpp"

namespace lvim::cli {

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    rows.push_back(std::move(row));
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string normalize_cell(const std::string& cell) {
    if (cell.empty()) return cell;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE) return cell;
    return format_number(v);
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
    write_line(out, table.header);
    for (const auto& row : table.rows) write_line(out, row);
}

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("csv: empty input");
    table.header = split(line);
    while (std::getline(in, line)) {
        auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw InvalidArgument("csv: row " + std::to_string(table.rows.size() + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(table.header.size()));
        }
        for (auto& c : cells) c = normalize_cell(c);
        table.rows.push_back(std::move(cells));
    }
    return table;
}

double RunReport::worst_discrepancy() const {
    if (!max_discrepancy || max_discrepancy->empty()) return 0.0;
    return *std::max_element(max_discrepancy->begin(), max_discrepancy->end());
}

nlohmann::ordered_json to_json(const RunReport& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["problem"] = r.problem;
    j["mode"] = r.mode;
    j["status"] = r.status;
    j["config"] = {{"n", r.lvim.n_basis},
                   {"dt", r.lvim.dt},
                   {"tol", r.lvim.tol},
                   {"jacobian", to_string(r.lvim.jacobian_mode)},
                   {"rel_tol", r.rk.rel_tol},
                   {"abs_tol", r.rk.abs_tol}};
    j["parameters"] = json::object();
    for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
    j["columns"] = r.columns;
    j["samples"] = r.samples;
    j["total_iterations"] = r.total_iterations;
    j["total_rhs_evals"] = r.total_rhs_evals;
    j["rounding_floor_segments"] = r.rounding_floor_segments;
    j["wall_time_s"] = r.wall_time_s;
    if (r.max_discrepancy) j["max_discrepancy"] = *r.max_discrepancy;
    if (r.oracle) {
        j["oracle"] = {{"accepted_steps", r.oracle->accepted_steps},
                       {"rejected_steps", r.oracle->rejected_steps},
                       {"total_rhs_evals", r.oracle->total_rhs_evals},
                       {"wall_time_s", r.oracle->wall_time_s}};
    }
    j["diagnostics"] = json::object();
    for (const auto& [k, v] : r.diagnostics) j["diagnostics"][k] = v;
    j["notes"] = r.notes;
    return j;
}

CsvTable to_table(const RunReport& r) {
    CsvTable table;
    table.header = r.columns;
    const bool with_oracle = !r.oracle_samples.empty();
    if (with_oracle) {
        for (std::size_t i = 1; i < r.columns.size(); ++i) table.header.push_back("oracle_" + r.columns[i]);
    }
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        std::vector<double> row = r.samples[i];
        if (with_oracle) row.insert(row.end(), r.oracle_samples[i].begin(), r.oracle_samples[i].end());
        table.add_row(row);
    }
    return table;
}

void write_summary(std::ostream& out, const RunReport& r) {
    out << "# problem: " << r.problem << " (" << r.mode << ", " << r.status << ")\n";
    out << "# config: n=" << r.lvim.n_basis << " dt=" << r.lvim.dt << " tol=" << r.lvim.tol
        << " jacobian=" << to_string(r.lvim.jacobian_mode) << " rel_tol=" << r.rk.rel_tol
        << " abs_tol=" << r.rk.abs_tol << '\n';
    for (const auto& [k, v] : r.parameters) out << "# parameter " << k << ": " << v << '\n';
    out << "# total_iterations: " << r.total_iterations << '\n';
    out << "# total_rhs_evals: " << r.total_rhs_evals << '\n';
    if (r.rounding_floor_segments) out << "# rounding_floor_segments: " << r.rounding_floor_segments << '\n';
    out << "# wall_time_s: " << r.wall_time_s << '\n';
    if (r.max_discrepancy) {
        out << "# max_discrepancy:";
        for (std::size_t i = 0; i < r.max_discrepancy->size(); ++i) {
            out << ' ' << r.columns[i + 1] << '=' << (*r.max_discrepancy)[i];
        }
        out << '\n';
    }
    if (r.oracle) {
        out << "# oracle: accepted_steps=" << r.oracle->accepted_steps
            << " rejected_steps=" << r.oracle->rejected_steps
            << " total_rhs_evals=" << r.oracle->total_rhs_evals << " wall_time_s=" << r.oracle->wall_time_s
            << '\n';
    }
    for (const auto& [k, v] : r.diagnostics) out << "# " << k << ": " << v << '\n';
    for (const auto& n : r.notes) out << "# note: " << n << '\n';
}

}  // namespace lvim::cli
