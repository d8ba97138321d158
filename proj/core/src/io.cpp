#include <dualflow/io.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dualflow {

namespace {

constexpr const char* kTraceHeader = "step,t,dt,eta,J,Vg,h_min,h_max,radius_min,K_max,residual";
constexpr const char* kProfileHeader = "theta,h,det_b,rho";

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // binary: no \r\n translation anywhere
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return is;
}

std::string read_line(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_field(const std::string& text, const std::string& path, std::size_t row) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw std::runtime_error(path + ": row " + std::to_string(row) + " has a non-numeric field \"" + text + "\"");
  }
  return v;
}

// nlohmann::json emits null for NaN and infinities; the reports replace such
// entries with a string so downstream tooling sees why the number is absent.
nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json audit_to_json(const AuditReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j;
    j["name"] = c.name;
    j["evaluated"] = c.evaluated;
    j["pass"] = c.pass;
    if (c.evaluated) {
      j["worst_step"] = c.worst_step;
      j["worst_value"] = finite_or_null(c.worst_value);
    }
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(std::move(j));
  }
  return nlohmann::json{{"pass", report.pass}, {"checks", std::move(checks)}};
}

nlohmann::json residual_to_json(const ResidualReport& report) {
  return nlohmann::json{{"c_from_eta", finite_or_null(report.c_from_eta)},
                        {"c_least_squares", finite_or_null(report.c_least_squares)},
                        {"residual_sup", finite_or_null(report.residual_sup)},
                        {"residual_l2", finite_or_null(report.residual_l2)},
                        {"residual_sup_lsq", finite_or_null(report.residual_sup_lsq)}};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const FlowTrace& trace) {
  std::ofstream os = open_out(path);
  os << kTraceHeader << "\n";
  for (const auto& r : trace.records) {
    os << r.step << ',' << format_double(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.eta) << ','
       << format_double(r.energy) << ',' << format_double(r.dual_volume) << ',' << format_double(r.h_min) << ','
       << format_double(r.h_max) << ',' << format_double(r.radius_min) << ',' << format_double(r.curvature_max) << ','
       << format_double(r.residual_sup) << "\n";
  }
  if (!os) throw std::runtime_error("short write to " + path);
}

FlowTrace read_trace_csv(const std::string& path) {
  std::ifstream is = open_in(path);
  if (read_line(is) != kTraceHeader) {
    throw std::runtime_error(path + ": header does not match \"" + kTraceHeader + "\"");
  }
  FlowTrace trace;
  std::size_t row = 1;
  while (is) {
    const std::string line = read_line(is);
    if (line.empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != 11) {
      throw std::runtime_error(path + ": row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                               " fields, expected 11");
    }
    TraceRecord r;
    r.step = static_cast<std::size_t>(parse_field(fields[0], path, row));
    r.t = parse_field(fields[1], path, row);
    r.dt = parse_field(fields[2], path, row);
    r.eta = parse_field(fields[3], path, row);
    r.energy = parse_field(fields[4], path, row);
    r.dual_volume = parse_field(fields[5], path, row);
    r.h_min = parse_field(fields[6], path, row);
    r.h_max = parse_field(fields[7], path, row);
    r.radius_min = parse_field(fields[8], path, row);
    r.curvature_max = parse_field(fields[9], path, row);
    r.residual_sup = parse_field(fields[10], path, row);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.radius_max = nan;
    r.grad_max = nan;
    r.energy_gap = nan;
    r.velocity_sup = nan;
    trace.records.push_back(std::move(r));
    ++row;
  }
  return trace;
}

void write_profile_csv(const std::string& path, const SupportField& field) {
  std::ofstream os = open_out(path);
  os << kProfileHeader << "\n";
  const auto& grid = field.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_double(grid.theta()[i]) << ',' << format_double(field.h()[i]) << ','
       << format_double(field.det_b()[i]) << ',' << format_double(field.rho()[i]) << "\n";
  }
  if (!os) throw std::runtime_error("short write to " + path);
}

std::vector<double> read_profile_h(const std::string& path) {
  std::ifstream is = open_in(path);
  if (read_line(is) != kProfileHeader) {
    throw std::runtime_error(path + ": header does not match \"" + kProfileHeader + "\"");
  }
  std::vector<double> h;
  std::size_t row = 1;
  while (is) {
    const std::string line = read_line(is);
    if (line.empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != 4) {
      throw std::runtime_error(path + ": row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                               " fields, expected 4");
    }
    h.push_back(parse_field(fields[1], path, row));
    ++row;
  }
  return h;
}

std::string audit_json(const AuditReport& report) { return audit_to_json(report).dump(2); }

std::string residual_json(const ResidualReport& report) { return residual_to_json(report).dump(2); }

void write_report_json(const std::string& path, const RunReport& report) {
  nlohmann::json j;
  j["verdict"] = {{"status", to_string(report.status)},
                  {"steps", report.steps},
                  {"t_final", finite_or_null(report.t_final)},
                  {"residual_final", finite_or_null(report.residual_final)}};
  if (report.failure) j["failure"] = *report.failure;
  j["residual"] = residual_to_json(report.residual);
  j["audit"] = audit_to_json(report.audit);
  if (!report.config_json.empty()) {
    nlohmann::json cfg = nlohmann::json::parse(report.config_json, nullptr, false);
    j["config"] = cfg.is_discarded() ? nlohmann::json(report.config_json) : cfg;
  }
  std::ofstream os = open_out(path);
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("short write to " + path);
}

void write_plotdata(const std::string& dir, const SphericalGrid& grid, const FlowTrace& trace,
                    const std::vector<Snapshot>& snapshots) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream os = open_out(dir + "/h_snapshots.csv");
    os << "theta";
    for (const auto& s : snapshots) os << ",t=" << format_double(s.t);
    os << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      os << format_double(grid.theta()[i]);
      for (const auto& s : snapshots) {
        if (s.h.size() != grid.size()) throw std::invalid_argument("snapshot size does not match the grid");
        os << ',' << format_double(s.h[i]);
      }
      os << "\n";
    }
  }
  {
    std::ofstream os = open_out(dir + "/J_vs_t.csv");
    os << "t,J\n";
    for (const auto& r : trace.records) os << format_double(r.t) << ',' << format_double(r.energy) << "\n";
  }
  {
    std::ofstream os = open_out(dir + "/Vg_vs_t.csv");
    os << "t,Vg\n";
    for (const auto& r : trace.records) os << format_double(r.t) << ',' << format_double(r.dual_volume) << "\n";
  }
}

}  // namespace dualflow
