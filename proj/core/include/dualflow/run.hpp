#pragma once

#include <optional>
#include <string>

#include <dualflow/config.hpp>

namespace dualflow {

// Output directory precedence: --out flag, then DUALFLOW_OUT from the
// environment, then the config's output block.
std::string resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& config);

// Runs the flow and writes trace.csv, profile_final.csv, report.json and, if
// enabled, plotdata/ under out_dir. Returns 0 when the run converged and the
// audit passed, 1 otherwise; report.json is written even on failure.
int run_command(const RunConfig& config, const std::string& out_dir, bool quiet);

// Audits an existing trace against the problem from config and prints the
// report as JSON. Returns 0 when every evaluated check passed, 1 otherwise.
int audit_command(const std::string& trace_csv, const RunConfig& config, bool quiet);

// Evaluates the stationarity residual of a stored profile and prints the
// report as JSON. Returns 0.
int residual_command(const std::string& profile_csv, const RunConfig& config, bool quiet);

}  // namespace dualflow
