#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lvim/lvim.hpp"
#include "lvim/rk45.hpp"

namespace lvim::cli {

/// %.17g, enough to round-trip any double.
std::string format_number(double value);

/// Header plus rows of cells. Numeric cells are stored already formatted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
};

void write_csv(std::ostream& out, const CsvTable& table);

/// Inverse of write_csv. Cells that parse completely as numbers are re-formatted
/// with format_number, everything else is kept verbatim.
CsvTable parse_csv(std::istream& in);

struct OracleStats {
    std::uint64_t accepted_steps = 0;
    std::uint64_t rejected_steps = 0;
    std::uint64_t total_rhs_evals = 0;
    double wall_time_s = 0.0;
};

struct RunReport {
    std::string problem;
    std::string mode = "run";      // run | compare
    std::string status = "ok";     // ok | partial
    SolverConfig lvim;
    RkConfig rk;
    std::map<std::string, double> parameters;
    std::vector<std::string> columns;  // "t" first
    std::vector<std::vector<double>> samples;
    long total_iterations = 0;
    std::uint64_t total_rhs_evals = 0;
    std::size_t rounding_floor_segments = 0;
    double wall_time_s = 0.0;
    std::optional<std::vector<double>> max_discrepancy;  // compare only
    std::optional<OracleStats> oracle;                   // compare only
    std::vector<std::vector<double>> oracle_samples;     // CSV only, rows match samples
    std::map<std::string, double> diagnostics;
    std::vector<std::string> notes;

    double worst_discrepancy() const;
};

nlohmann::ordered_json to_json(const RunReport& report);

/// Samples as a table; compare mode appends one oracle_<name> column per state.
CsvTable to_table(const RunReport& report);

/// "# key: value" summary lines for the CSV path, where the table holds samples only.
void write_summary(std::ostream& out, const RunReport& report);

}  // namespace lvim::cli
