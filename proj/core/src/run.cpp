#include <dualflow/run.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <dualflow/io.hpp>
#include <dualflow/verify.hpp>

namespace dualflow {

std::string resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& config) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("DUALFLOW_OUT"); env && *env) return env;
  return config.out_dir;
}

int run_command(const RunConfig& config, const std::string& out_dir, bool quiet) {
  std::filesystem::create_directories(out_dir);
  RunReport report;
  report.config_json = resolved_config_json(config);

  try {
    const ProblemSpec spec = build_problem(config);
    const SupportField initial = make_initial(config.initial, spec.grid_ptr());

    // Snapshots at t = 0, the first accepted step, then doubling times; the
    // final state is appended afterwards so the sequence always ends there.
    std::vector<Snapshot> snapshots;
    double next_t = 0.0;
    const auto observer = [&](const FlowState& state) {
      if (!snapshots.empty() && state.t < next_t) return;
      snapshots.push_back({state.t, std::vector<double>(state.field.h().begin(), state.field.h().end())});
      next_t = state.t > 0.0 ? 2.0 * state.t : 0.0;
    };

    const RunResult result = run(spec, initial, config.flow, observer);
    if (snapshots.empty() || snapshots.back().t != result.state.t) {
      snapshots.push_back(
          {result.state.t, std::vector<double>(result.state.field.h().begin(), result.state.field.h().end())});
    }

    report.status = result.status;
    report.steps = result.state.steps;
    report.t_final = result.state.t;
    report.residual_final = result.residual_final;
    if (!result.failure.empty()) report.failure = result.failure;
    report.residual = residual(result.state.field, spec);
    report.audit = audit(result.trace, spec);

    write_trace_csv(out_dir + "/trace.csv", result.trace);
    write_profile_csv(out_dir + "/profile_final.csv", result.state.field);
    if (config.plotdata) write_plotdata(out_dir + "/plotdata", spec.grid(), result.trace, snapshots);
    write_report_json(out_dir + "/report.json", report);

    const bool ok = result.status == RunStatus::converged && report.audit.pass;
    if (!quiet) {
      std::cout << "status=" << to_string(result.status) << " steps=" << report.steps
                << " t=" << format_double(report.t_final)
                << " residual_sup=" << format_double(report.residual.residual_sup)
                << " audit=" << (report.audit.pass ? "pass" : "fail") << "\n";
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    report.failure = e.what();
    write_report_json(out_dir + "/report.json", report);
    if (!quiet) std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int audit_command(const std::string& trace_csv, const RunConfig& config, bool quiet) {
  const FlowTrace trace = read_trace_csv(trace_csv);
  const ProblemSpec spec = build_problem(config);
  const AuditReport report = audit(trace, spec);
  if (!quiet) std::cout << audit_json(report) << "\n";
  return report.pass ? 0 : 1;
}

int residual_command(const std::string& profile_csv, const RunConfig& config, bool quiet) {
  const ProblemSpec spec = build_problem(config);
  std::vector<double> h = read_profile_h(profile_csv);
  if (h.size() != spec.grid().size()) {
    throw std::runtime_error("profile has " + std::to_string(h.size()) + " rows but the grid has " +
                             std::to_string(spec.grid().size()) + " nodes");
  }
  const SupportField field(spec.grid_ptr(), std::move(h));
  const ResidualReport report = residual(field, spec);
  if (!quiet) std::cout << residual_json(report) << "\n";
  return 0;
}

}  // namespace dualflow
