#pragma once

#include <iosfwd>
#include <string>

#include "aplab/experiments.hpp"
#include "aplab/process.hpp"
#include "aplab/size_pmf.hpp"
#include "aplab/stitch.hpp"

namespace aplab {

// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

// Run configuration <-> JSON (the shape echoed in every output header).
std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

// Statistics series as long-form CSV (columns step,t,S,L1,k,N_k; one row per
// snapshot and occupied size) or nested JSON (snapshots with histogram and
// cycle census). Both start with the resolved config echo, so either output
// reproduces its run byte for byte.
void write_series_csv(std::ostream& os, const StatsSeries& series);
std::string series_to_json(const StatsSeries& series);

// Size pmfs as {"pmf": {"k": p, ...}, "remainder": r}.
std::string pmf_to_json(const SizePmf& pmf);
SizePmf pmf_from_json(const std::string& text);

std::string rho_to_json(const RhoEstimate& est, const std::string& config_json = "{}");

// Staged stitching table: j, L, delta, t_end, chi, chi_stderr, truncated.
void write_stitch_csv(std::ostream& os, const StitchResult& result);

// Experiment reports: long CSV (the measurement table) and JSON with config,
// fitted parameters, verdict and notes.
void write_report_csv(std::ostream& os, const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);

}  // namespace aplab
