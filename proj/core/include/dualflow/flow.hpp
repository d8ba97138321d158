#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <dualflow/functionals.hpp>

namespace dualflow {

struct FlowConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  double safety = 1.2;        // step growth factor, applied after 5 consecutive accepts
                              // while the grown step stays inside the linear stability bound
  double tol_conv = 1e-8;     // converged when sup|dh/dt| <= tol_conv * sup|h|
  double tol_energy = 1e-10;  // allowed wrong-direction energy move, scaled by 1 + |energy|
  std::size_t max_steps = 400000;
  enum class Renormalize { none, dual_volume } renormalize = Renormalize::dual_volume;

  void validate() const;  // 0 < dt_min <= dt_init <= dt_max, tol_conv > 0, safety >= 1
};

// Rejection guards, checked in this order; only the first failure is reported.
enum class Guard { convexity, positivity, energy_direction };
const char* to_string(Guard g) noexcept;

struct TraceRecord {
  std::size_t step = 0;  // 0 is the initial state
  double t = 0.0;
  double dt = 0.0;  // step size that produced this state; 0 for the initial record
  double eta = 0.0;
  double energy = 0.0;
  double dual_volume = 0.0;
  double h_min = 0.0, h_max = 0.0;
  double radius_min = 0.0;      // min principal curvature radius over nodes
  double curvature_max = 0.0;   // max Gauss curvature over nodes
  double residual_sup = 0.0;    // stationary-equation residual with c = 1/eta
  // In-memory extras, not part of the CSV trace format:
  double radius_max = 0.0;
  double grad_max = 0.0;
  double energy_gap = 0.0;    // Cauchy-Schwarz gap from energy_rate_identity
  double velocity_sup = 0.0;  // sup|dh/dt| at this state
};

struct RejectionRecord {
  std::size_t step = 0;  // index of the accepted step being attempted
  double t = 0.0;
  double dt = 0.0;  // rejected step size
  Guard guard = Guard::convexity;
  std::size_t node = 0;  // offending node for convexity/positivity
};

struct FlowTrace {
  std::vector<TraceRecord> records;
  std::vector<RejectionRecord> rejections;
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(Guard g, double dt);
  Guard guard;
  double dt;
};

struct FlowState {
  double t = 0.0;
  SupportField field;
  FunctionalReport report;
  std::size_t steps = 0;
  double dt = 0.0;  // next step size to try; 0 means "use config.dt_init"
  std::size_t accept_streak = 0;
  double dual_volume_target = 0.0;  // renormalization target, fixed at t = 0
  double last_dt = 0.0;             // step size that produced this state
};

// dh/dt per node: -f eta h K / (phi(h) G(boundary)) + h, with K = 1/det b and
// eta recomputed from this very field. Throws ConvexityLoss on nonpositive
// curvature radii.
std::vector<double> velocity(const SupportField& field, const ProblemSpec& spec);

// Validates the initial field (even to 1e-12, then symmetrized exactly;
// positive; uniformly convex) and evaluates its functionals.
FlowState make_state(SupportField field, const ProblemSpec& spec);

// One accepted explicit midpoint step: tries the state's dt, halving on every
// guard rejection (logged into trace when given) until a candidate passes all
// guards, then symmetrizes and optionally rescales to the dual-volume target.
// Throws StepFailure once dt would sink below config.dt_min.
FlowState step(const FlowState& state, const ProblemSpec& spec, const FlowConfig& config,
               FlowTrace* trace = nullptr);

enum class RunStatus { converged, max_steps, step_failed };
const char* to_string(RunStatus s) noexcept;

struct RunResult {
  RunStatus status = RunStatus::max_steps;
  FlowState state;
  FlowTrace trace;
  double residual_final = 0.0;  // sup residual with c = 1/eta at the final state
  std::string failure;          // guard description when status == step_failed
};

// The observer, when given, sees every state that gets a trace record (the
// initial one included), in time order.
RunResult run(const ProblemSpec& spec, const SupportField& initial, const FlowConfig& config,
              const std::function<void(const FlowState&)>& observer = {});

// Initial bodies, sampled from closed-form support functions.
struct Ball {
  double r = 1.0;
};
struct Ellipse {  // n=2: h = sqrt(a^2 cos^2 + b^2 sin^2)
  double a = 1.0, b = 1.0;
};
struct Ellipsoid {  // n=3 revolution: h = sqrt(a^2 sin^2 + c^2 cos^2)
  double a = 1.0, c = 1.0;
};
struct Perturbed {  // h = 1 + sum_k eps[k-1] cos(2 k theta)
  std::vector<double> eps;
};
struct RandomPerturbed {  // Perturbed with amplitudes drawn uniformly from [-amp, amp]
  int modes = 3;
  double amp = 0.05;
  std::uint64_t seed = 0;
};
using Shape = std::variant<Ball, Ellipse, Ellipsoid, Perturbed, RandomPerturbed>;

// Throws NotConvex for parameter sets whose sampled body is not uniformly
// convex on the grid; throws std::invalid_argument for nonpositive sizes or a
// shape/dimension mismatch.
SupportField make_initial(const Shape& shape, std::shared_ptr<const SphericalGrid> grid);

}  // namespace dualflow
