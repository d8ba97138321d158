#pragma once

#include <optional>
#include <string>

#include <dualflow/flow.hpp>

namespace dualflow {

// Pointwise defect of the stationary equation c phi(h) G(boundary) det b = f,
// normalized by f so tolerances carry over to non-constant data.
struct ResidualReport {
  double c_from_eta = 0.0;       // 1/eta, the constant the flow converges to
  double c_least_squares = 0.0;  // quadrature-weighted fit of c against f
  double residual_sup = 0.0;     // with the primary c (explicit c if given, else 1/eta)
  double residual_l2 = 0.0;      // weighted RMS with the primary c
  double residual_sup_lsq = 0.0;  // diagnostic: sup residual with the fitted c
  std::vector<double> per_node;   // |c g - f| / f with the primary c
};

ResidualReport residual(const SupportField& field, const ProblemSpec& spec,
                        std::optional<double> c = std::nullopt);

class EmptyTrace : public std::runtime_error {
 public:
  EmptyTrace();
};

struct AuditTolerances {
  double dual_volume_rel = 1e-9;  // relative drift from the baseline
  double energy_slack = 1e-10;    // wrong-direction move allowance, times 1 + |energy|
  double corridor_lo = 1e-3;      // lower edge for h, eta, curvature corridors
  double corridor_hi = 1e3;       // upper edge, also caps max K and max |grad h|
  double gap_floor = -1e-12;      // quadrature-noise allowance on the Cauchy-Schwarz gap
  // Drift baseline; defaults to the trace's first record. Pass explicitly when
  // auditing a slice that does not start at t = 0.
  std::optional<double> dual_volume_baseline;
};

// One audited invariant. worst_value is a violation measure (larger = worse,
// <= 0 means satisfied with margin); evaluated is false when the trace does
// not carry the needed diagnostic (CSV round trips drop the in-memory extras).
struct CheckResult {
  std::string name;
  bool evaluated = false;
  bool pass = true;
  std::size_t worst_step = 0;
  double worst_value = 0.0;
  std::string detail;
};

struct AuditReport {
  std::vector<CheckResult> checks;
  bool pass = true;  // conjunction over evaluated checks
};

// Checks, over every record: dual-volume conservation, energy monotonicity in
// the case's direction, corridor bounds on h / eta / max K / principal radii /
// max |grad h|, and nonnegativity of the energy-rate gap.
AuditReport audit(const FlowTrace& trace, const ProblemSpec& spec,
                  const AuditTolerances& tol = AuditTolerances());

// Combines audits of trace slices that share their boundary record; equals
// the audit of the concatenated trace.
AuditReport merge(const AuditReport& a, const AuditReport& b);

// Ball-body residuals of the power-law family across both grid dimensions and
// radii {0.5, 1, 2}, with c = f0 r^(p-q) substituted directly. Requires a
// power-law spec with constant f.
struct ConsistencyEntry {
  int dim = 2;
  double r = 1.0;
  double c = 0.0;
  double residual_sup = 0.0;
};
struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  bool pass = true;
};
ConsistencyReport cross_dimension_consistency(const ProblemSpec& spec);

}  // namespace dualflow
