#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <dualflow/flow.hpp>

namespace dualflow {

struct SchemaError {
  std::string path;
  std::string message;
};

// Carries every violation found in one parse, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<SchemaError> errors);
  std::vector<SchemaError> errors;
};

// Fully resolved run description: after parsing, every field holds its final
// value (defaults applied), so echoing it documents the exact run.
struct RunConfig {
  int dim = 2;
  std::size_t nodes = 256;

  std::optional<double> p;  // power-law weight exponent; table below otherwise
  std::vector<double> weight_s, weight_phi;
  std::optional<double> q;  // radial-power density exponent; table below otherwise
  std::vector<double> density_r, density_g;

  std::string f = "1";  // angular expression, sampled on the grid

  FlowConfig flow;
  Shape initial = Ball{1.0};
  std::uint64_t seed = 0;

  std::string out_dir = "out";
  bool plotdata = false;
};

// Parses the documented JSON schema; unknown keys are rejected and all
// violations are collected into one ConfigError.
RunConfig parse_config(const std::string& json_text);

// Builds grid, weight, density and the f samples. Case classification and
// the evenness/positivity checks on f run here and throw.
ProblemSpec build_problem(const RunConfig& config);

// Canonical JSON echo of a config, defaults included.
std::string resolved_config_json(const RunConfig& config);

}  // namespace dualflow
