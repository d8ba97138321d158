#include <dualflow/verify.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dualflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ResidualReport residual(const SupportField& field, const ProblemSpec& spec, std::optional<double> c) {
  if (field.size() != spec.grid().size() || field.grid().dim() != spec.grid().dim()) {
    throw std::invalid_argument("residual: field grid does not match problem grid");
  }
  const std::size_t n = field.size();
  const auto det = field.det_b();
  const auto h = field.h();
  const auto f = spec.f();

  std::vector<double> g(n), fg(n), gg(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = spec.weight().eval(h[i]) * density_at_boundary(field, spec.density(), i) * det[i];
    fg[i] = f[i] * g[i];
    gg[i] = g[i] * g[i];
  }

  ResidualReport rep;
  rep.c_from_eta = 1.0 / eta(field, spec).value;
  rep.c_least_squares = field.grid().integrate(fg) / field.grid().integrate(gg);
  const double c0 = c ? *c : rep.c_from_eta;

  rep.per_node.resize(n);
  std::vector<double> r2(n), ones(n, 1.0);
  double sup_lsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.per_node[i] = std::fabs(c0 * g[i] - f[i]) / f[i];
    rep.residual_sup = std::max(rep.residual_sup, rep.per_node[i]);
    r2[i] = rep.per_node[i] * rep.per_node[i];
    sup_lsq = std::max(sup_lsq, std::fabs(rep.c_least_squares * g[i] - f[i]) / f[i]);
  }
  rep.residual_l2 = std::sqrt(field.grid().integrate(r2) / field.grid().integrate(ones));
  rep.residual_sup_lsq = sup_lsq;
  return rep;
}

EmptyTrace::EmptyTrace() : std::runtime_error("trace has no records") {}

AuditReport audit(const FlowTrace& trace, const ProblemSpec& spec, const AuditTolerances& tol) {
  if (trace.records.empty()) throw EmptyTrace();
  const std::vector<TraceRecord>& rs = trace.records;
  AuditReport rep;

  {
    CheckResult c;
    c.name = "dual-volume-conservation";
    c.evaluated = true;
    c.worst_value = kNegInf;
    const double base = tol.dual_volume_baseline.value_or(rs.front().dual_volume);
    for (const auto& r : rs) {
      const double m = std::fabs(r.dual_volume - base) / std::fabs(base) - tol.dual_volume_rel;
      if (m > c.worst_value) {
        c.worst_value = m;
        c.worst_step = r.step;
      }
    }
    c.pass = !(c.worst_value > 0.0);
    c.detail = "max relative drift " + fmt(c.worst_value + tol.dual_volume_rel) + " at step " +
               std::to_string(c.worst_step);
    rep.checks.push_back(std::move(c));
  }
  {
    CheckResult c;
    c.name = "energy-monotonic";
    c.evaluated = true;
    c.worst_value = kNegInf;
    const bool decreasing = spec.case_tag() == CaseTag::case1;
    for (std::size_t k = 0; k + 1 < rs.size(); ++k) {
      const double move = decreasing ? rs[k + 1].energy - rs[k].energy : rs[k].energy - rs[k + 1].energy;
      const double m = move - tol.energy_slack * (1.0 + std::fabs(rs[k].energy));
      if (m > c.worst_value) {
        c.worst_value = m;
        c.worst_step = rs[k + 1].step;
      }
    }
    c.pass = !(c.worst_value > 0.0);
    c.detail = rs.size() < 2 ? "fewer than two records"
                             : (decreasing ? "non-increasing" : "non-decreasing") + std::string(" violated worst at step ") +
                                   std::to_string(c.worst_step);
    rep.checks.push_back(std::move(c));
  }

  const double lo = tol.corridor_lo, hi = tol.corridor_hi;
  auto corridor = [&](const std::string& name, auto measure, const char* what) {
    CheckResult c;
    c.name = name;
    c.evaluated = true;
    c.worst_value = kNegInf;
    for (const auto& r : rs) {
      const double m = measure(r);
      if (std::isnan(m)) {
        c.evaluated = false;
        c.detail = "trace does not carry this diagnostic";
        rep.checks.push_back(std::move(c));
        return;
      }
      if (m > c.worst_value) {
        c.worst_value = m;
        c.worst_step = r.step;
      }
    }
    c.pass = !(c.worst_value > 0.0);
    c.detail = std::string(what) + ", worst margin " + fmt(c.worst_value) + " at step " + std::to_string(c.worst_step);
    rep.checks.push_back(std::move(c));
  };

  corridor("h-corridor", [&](const TraceRecord& r) { return std::max(lo - r.h_min, r.h_max - hi); },
           "h within the corridor");
  corridor("eta-corridor", [&](const TraceRecord& r) { return std::max(lo - r.eta, r.eta - hi); },
           "eta within the corridor");
  corridor("curvature-max-corridor", [&](const TraceRecord& r) { return r.curvature_max - hi; },
           "max Gauss curvature bounded");
  corridor("radius-min-corridor", [&](const TraceRecord& r) { return lo - r.radius_min; },
           "principal radii bounded below");
  corridor("min-curvature-corridor", [&](const TraceRecord& r) { return r.radius_max - hi; },
           "principal curvatures bounded below");
  corridor("gradient-corridor", [&](const TraceRecord& r) { return r.grad_max - hi; }, "sup |grad h| bounded");
  corridor("energy-gap-nonnegative", [&](const TraceRecord& r) { return tol.gap_floor - r.energy_gap; },
           "Cauchy-Schwarz gap above the noise floor");

  rep.pass = true;
  for (const auto& c : rep.checks) {
    if (c.evaluated && !c.pass) rep.pass = false;
  }
  return rep;
}

AuditReport merge(const AuditReport& a, const AuditReport& b) {
  if (a.checks.size() != b.checks.size()) throw std::invalid_argument("merge: audits have different check sets");
  AuditReport out;
  out.pass = true;
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    const CheckResult& ca = a.checks[i];
    const CheckResult& cb = b.checks[i];
    if (ca.name != cb.name) throw std::invalid_argument("merge: audits have different check sets");
    if (!ca.evaluated || !cb.evaluated) {
      out.checks.push_back(ca.evaluated ? ca : cb);
    } else {
      out.checks.push_back(cb.worst_value > ca.worst_value ? cb : ca);
    }
    const CheckResult& m = out.checks.back();
    if (m.evaluated && !m.pass) out.pass = false;
  }
  return out;
}

ConsistencyReport cross_dimension_consistency(const ProblemSpec& spec) {
  const auto p = spec.weight().power();
  const auto q = spec.density().radial_exponent();
  if (!p || !q) throw std::invalid_argument("cross_dimension_consistency needs the power-law family");
  const double f0 = spec.f()[0];
  for (double v : spec.f()) {
    if (std::fabs(v - f0) > 1e-12 * std::max(1.0, std::fabs(f0))) {
      throw std::invalid_argument("cross_dimension_consistency needs constant f");
    }
  }

  ConsistencyReport rep;
  for (int dim : {2, 3}) {
    auto grid = std::make_shared<SphericalGrid>(dim, 64);
    ProblemSpec local(grid, spec.weight(), DualDensity::radial_power(dim, *q),
                      std::vector<double>(grid->size(), f0));
    for (double r : {0.5, 1.0, 2.0}) {
      const SupportField ball = make_initial(Ball{r}, grid);
      const double c = f0 * std::pow(r, *p - *q);
      const ResidualReport rr = residual(ball, local, c);
      rep.entries.push_back({dim, r, c, rr.residual_sup});
      if (!(rr.residual_sup <= 1e-12)) rep.pass = false;
    }
  }
  return rep;
}

}  // namespace dualflow
