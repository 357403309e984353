#pragma once

#include <map>
#include <string>

#include "rlab/cli/config.hpp"
#include "rlab/cli/report.hpp"

namespace rlab::cli {

struct ExperimentResult {
    json results;                          // goes under "results" in summary.json
    std::map<std::string, CsvTable> tables;  // file stem -> table
};

ExperimentResult run_experiment(const ResolvedConfig& cfg);

// summary.json text: kind, resolved config, config hash, results. Contains nothing
// that depends on the thread count, the output directory or the clock.
std::string summary_text(const ResolvedConfig& cfg, const ExperimentResult& r);

// Writes summary.json, <stem>.csv and <stem>.dat for every table, and run_info.json
// (thread count, wall time) into cfg.output_dir.
void write_reports(const ResolvedConfig& cfg, const ExperimentResult& r, double wall_seconds);

// Command line entry: rlab run|list|schema. Returns the process exit status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rlab::cli
