#pragma once

// Report emission for sweeps: a flat CSV of every (N, trial) risk, a JSON summary of the
// fits and a log-log SVG with one polyline per experiment.

#include <string>
#include <vector>

#include "json.hpp"
#include "ptolearn/harness/sweeps.hpp"

namespace ptolearn::harness {

struct CsvRow {
    std::string experiment;
    std::size_t n = 0;
    std::size_t trial = 0;
    double risk = 0.0;
    double slope = 0.0;
    double slopeStdErr = 0.0;
    double theoryExponent = 0.0;
    bool logFlag = false;

    bool operator==(const CsvRow&) const = default;
};

inline constexpr const char* kCsvHeader = "experiment,N,trial,risk,slope,slopeStdErr,theoryExponent,logFlag";

std::vector<CsvRow> csv_rows(const std::vector<SweepResult>& results);
std::string to_csv(const std::vector<SweepResult>& results);
std::vector<CsvRow> parse_csv(const std::string& text);

/// Rebuilds sweep results (records, medians, fit) from parsed rows; kind is not stored in the
/// CSV and defaults to EndToEnd unless the experiment name starts with "ff" or "compare_ff".
std::vector<SweepResult> results_from_rows(const std::vector<CsvRow>& rows, double tolerance = 0.15);

nlohmann::json summary_json(const std::vector<SweepResult>& results);
std::string render_svg(const std::vector<SweepResult>& results);

struct ReportPaths {
    std::string csv;   // empty: skip
    std::string json;
    std::string svg;
};

/// Throws std::runtime_error naming the path when a file cannot be written.
void emit_report(const std::vector<SweepResult>& results, const ReportPaths& paths);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace ptolearn::harness
