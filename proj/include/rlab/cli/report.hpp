#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

namespace rlab::cli {

using json = nlohmann::json;

// Deterministic JSON text: keys sorted, two-space indent, every floating-point
// value printed with %.17g. Non-finite values become the strings "inf", "-inf", "nan".
std::string dump_json(const json& j);

// Floating-point field in the same format as dump_json.
std::string format_double(double v);

// FNV-1a 64 of dump_json(resolved config), as "fnv1a64:" + 16 hex digits.
std::string config_hash(const json& resolved);

json to_json(std::complex<double> z);

// Comma-separated table, preceded by a "# config_hash=..." line.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

// Writers create parent directories as needed.
void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const CsvTable& t, const std::string& hash);
// Whitespace-separated, plot-ready version of the same table ("#" header lines).
void write_plot_table(const std::string& path, const CsvTable& t, const std::string& hash);

}  // namespace rlab::cli
