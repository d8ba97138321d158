#pragma once

#include <optional>
#include <string>
#include <vector>

#include <dualflow/field.hpp>
#include <dualflow/flow.hpp>
#include <dualflow/verify.hpp>

namespace dualflow {

// All decimal output uses 17 significant digits so that reading a file back
// reproduces every double bit for bit.
std::string format_double(double v);

// trace.csv carries one row per recorded state with the fixed header
//   step,t,dt,eta,J,Vg,h_min,h_max,radius_min,K_max,residual
// Diagnostics beyond these columns (gradient sup, energy gap, ...) live only
// in the in-memory trace; a trace read back from disk reports them as NaN and
// the audit marks the checks that need them as not evaluated.
void write_trace_csv(const std::string& path, const FlowTrace& trace);
FlowTrace read_trace_csv(const std::string& path);

// Profile rows are (node angle, h, det b, rho); the header names the columns.
void write_profile_csv(const std::string& path, const SupportField& field);
std::vector<double> read_profile_h(const std::string& path);

std::string audit_json(const AuditReport& report);
std::string residual_json(const ResidualReport& report);

struct RunReport {
  RunStatus status = RunStatus::max_steps;
  std::size_t steps = 0;
  double t_final = 0.0;
  double residual_final = 0.0;
  std::optional<std::string> failure;
  ResidualReport residual;
  AuditReport audit;
  std::string config_json;  // resolved config, embedded verbatim
};

void write_report_json(const std::string& path, const RunReport& report);

struct Snapshot {
  double t = 0.0;
  std::vector<double> h;
};

// Emits h_snapshots.csv (theta plus one column per snapshot time), J_vs_t.csv
// and Vg_vs_t.csv under dir, creating it if needed.
void write_plotdata(const std::string& dir, const SphericalGrid& grid, const FlowTrace& trace,
                    const std::vector<Snapshot>& snapshots);

}  // namespace dualflow
