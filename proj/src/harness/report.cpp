#include "ptolearn/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ptolearn::harness {

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
    return out.str();
}

double parse_double(const std::string& field) {
    if (field == "nan") return std::nan("");
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("malformed number '" + field + "'");
    return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::vector<CsvRow> csv_rows(const std::vector<SweepResult>& results) {
    std::vector<CsvRow> rows;
    for (const auto& r : results)
        for (const auto& rec : r.records)
            rows.push_back({r.experiment, rec.n, rec.trial, rec.risk, r.fit.slope, r.fit.slopeStdErr,
                            r.theory.exponent, r.theory.logFactor});
    return rows;
}

std::string to_csv(const std::vector<SweepResult>& results) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& row : csv_rows(results)) {
        require(row.experiment.find_first_of(",\n\"") == std::string::npos,
                "experiment names may not contain commas, quotes or newlines: '" + row.experiment + "'");
        out << row.experiment << ',' << row.n << ',' << row.trial << ',' << format_double(row.risk) << ','
            << format_double(row.slope) << ',' << format_double(row.slopeStdErr) << ','
            << format_double(row.theoryExponent) << ',' << (row.logFlag ? 1 : 0) << '\n';
    }
    return out.str();
}

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::invalid_argument("CSV header does not match '" + std::string(kCsvHeader) + "'");
    std::vector<CsvRow> rows;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8)
            throw std::invalid_argument("CSV line " + std::to_string(lineNo) + ": expected 8 fields, got " +
                                        std::to_string(f.size()));
        try {
            rows.push_back({f[0], std::stoull(f[1]), std::stoull(f[2]), parse_double(f[3]), parse_double(f[4]),
                            parse_double(f[5]), parse_double(f[6]), f[7] == "1"});
        } catch (const std::exception& e) {
            throw std::invalid_argument("CSV line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return rows;
}

std::vector<SweepResult> results_from_rows(const std::vector<CsvRow>& rows, double tolerance) {
    std::vector<SweepResult> results;
    for (const auto& row : rows) {
        auto it = std::find_if(results.begin(), results.end(),
                               [&](const SweepResult& r) { return r.experiment == row.experiment; });
        if (it == results.end()) {
            SweepResult r;
            r.experiment = row.experiment;
            r.kind = row.experiment.rfind("ff", 0) == 0 || row.experiment.rfind("compare_ff", 0) == 0
                         ? SweepKind::FullField
                         : SweepKind::EndToEnd;
            r.theory = {row.theoryExponent, row.logFlag};
            r.tolerance = tolerance;
            results.push_back(r);
            it = std::prev(results.end());
        }
        it->records.push_back({row.n, row.trial, row.risk});
    }
    for (auto& r : results) summarize(r);
    return results;
}

nlohmann::json summary_json(const std::vector<SweepResult>& results) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json medians = nlohmann::json::array();
        for (std::size_t i = 0; i < r.nGrid.size(); ++i) medians.push_back({{"N", r.nGrid[i]}, {"medianRisk", r.medians[i]}});
        out.push_back({{"experiment", r.experiment},
                       {"kind", to_string(r.kind)},
                       {"trials", r.nGrid.empty() ? 0 : r.records.size() / r.nGrid.size()},
                       {"medians", medians},
                       {"fitFromN", r.nGrid.empty() ? 0 : r.nGrid[r.fitFrom]},
                       {"slope", finite_or_null(r.fit.slope)},
                       {"slopeStdErr", finite_or_null(r.fit.slopeStdErr)},
                       {"rSquared", finite_or_null(r.fit.rSquared)},
                       {"theoryExponent", r.theory.exponent},
                       {"logFlag", r.theory.logFactor},
                       {"tolerance", r.tolerance},
                       {"withinTolerance", r.within_tolerance()}});
    }
    return out;
}

std::string render_svg(const std::vector<SweepResult>& results) {
    const double width = 640, height = 440, left = 70, right = 170, top = 20, bottom = 50;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.nGrid.size(); ++i) {
            if (r.nGrid[i] == 0 || !(r.medians[i] > 0.0)) continue;
            xmin = std::min(xmin, std::log10(static_cast<double>(r.nGrid[i])));
            xmax = std::max(xmax, std::log10(static_cast<double>(r.nGrid[i])));
            ymin = std::min(ymin, std::log10(r.medians[i]));
            ymax = std::max(ymax, std::log10(r.medians[i]));
        }
    if (!(xmax > xmin)) xmin = 0, xmax = 1;
    if (!(ymax > ymin)) ymin = -1, ymax = 0;
    const double plotW = width - left - right, plotH = height - top - bottom;
    auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * plotW; };
    auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * plotH; };

    std::ostringstream svg;
    svg << std::fixed << std::setprecision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plotW << "\" height=\"" << plotH
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << left + plotW / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">log10 N</text>\n";
    svg << "<text x=\"16\" y=\"" << top + plotH / 2 << "\" transform=\"rotate(-90 16 " << top + plotH / 2
        << ")\" text-anchor=\"middle\">log10 median risk</text>\n";
    for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t)
        svg << "<text x=\"" << px(t) << "\" y=\"" << top + plotH + 18 << "\" text-anchor=\"middle\">" << t << "</text>\n";
    for (int t = static_cast<int>(std::ceil(ymin)); t <= static_cast<int>(std::floor(ymax)); ++t)
        svg << "<text x=\"" << left - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << t << "</text>\n";

    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        const char* color = kPalette[k % std::size(kPalette)];
        svg << "<polyline class=\"family\" data-experiment=\"" << r.experiment << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < r.nGrid.size(); ++i) {
            if (r.nGrid[i] == 0 || !(r.medians[i] > 0.0)) continue;
            svg << px(std::log10(static_cast<double>(r.nGrid[i]))) << ',' << py(std::log10(r.medians[i])) << ' ';
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << width - right + 8 << "\" y=\"" << top + 16 + 18 * static_cast<double>(k)
            << "\" fill=\"" << color << "\">" << r.experiment << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void emit_report(const std::vector<SweepResult>& results, const ReportPaths& paths) {
    if (!paths.csv.empty()) write_text(paths.csv, to_csv(results));
    if (!paths.json.empty()) write_text(paths.json, summary_json(results).dump(2) + "\n");
    if (!paths.svg.empty()) write_text(paths.svg, render_svg(results));
}

}  // namespace ptolearn::harness
