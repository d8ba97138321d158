#include <dualflow/flow.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <dualflow/verify.hpp>

namespace dualflow {

namespace {

struct GuardReject {
  Guard guard;
  std::size_t node;
};

// Convexity first, positivity second; only the first failure surfaces.
// Works on raw candidate samples so rejected steps never build a field.
void check_guards(const SphericalGrid& grid, const std::vector<double>& h, std::vector<double>& dh,
                  std::vector<double>& d2h) {
  grid.derivative2(h, d2h);
  const bool axi = grid.dim() == 3;
  if (axi) grid.derivative1(h, dh);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double l1 = d2h[i] + h[i];
    if (!(l1 > 0.0)) throw GuardReject{Guard::convexity, i};
    if (axi) {
      const double l2 = dh[i] * grid.cos_theta()[i] / grid.sin_theta()[i] + h[i];
      if (!(l2 > 0.0)) throw GuardReject{Guard::convexity, i};
    }
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) throw GuardReject{Guard::positivity, i};
  }
}

std::vector<double> velocity_with_eta(const SupportField& field, const ProblemSpec& spec, double eta_value) {
  const auto det = field.det_b();
  const auto h = field.h();
  const auto f = spec.f();
  std::vector<double> v(field.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double g = density_at_boundary(field, spec.density(), i);
    v[i] = -f[i] * eta_value * h[i] / (det[i] * spec.weight().eval(h[i]) * g) + h[i];
  }
  return v;
}

// Whether every mode of the linearized step still decays at step size dt. The
// stiffest rate comes from the curvature response to the highest grid mode:
// perturbing h by e^{ikx} perturbs the principal radii through the derivative
// stencils, whose symbols peak at 16/(3 dx^2) (second derivative) and at
// 2.744/dx^2 (first derivative against the cotangent next to the pole). The
// velocity's sensitivity to those radii is (h - v)/radius per node, so the
// per-node rate bound is their product; dt * rate <= 1.5 keeps the two-stage
// update contracting with margin. Without this cap, step growth crosses the
// stability boundary and pumps the highest mode into visible bursts: the
// curvature spikes along the trace and the velocity never settles below a
// noise floor, however long the run.
bool stable_at(const SupportField& field, const std::vector<double>& v, double dt) {
  const SphericalGrid& grid = field.grid();
  const double inv_dx2 = 1.0 / (grid.spacing() * grid.spacing());
  const auto h = field.h();
  double mu = 0.0;
  if (grid.dim() == 2) {
    const auto det = field.det_b();
    for (std::size_t i = 0; i < h.size(); ++i) {
      mu = std::max(mu, (h[i] - v[i]) / det[i]);
    }
    mu *= (16.0 / 3.0) * inv_dx2;
  } else {
    const auto l1 = field.lambda1();
    const auto l2 = field.lambda2();
    for (std::size_t i = 0; i < h.size(); ++i) {
      mu = std::max(mu, (h[i] - v[i]) * ((16.0 / 3.0) / l1[i] + 2.744 / l2[i]) * inv_dx2);
    }
  }
  return dt * mu <= 1.5;
}

// Scale factor restoring the dual volume to target. The dual volume of s*K is
// strictly monotone in s: increasing in case1, decreasing in case2.
double renorm_scale(const SupportField& field, const ProblemSpec& spec, double target) {
  const double vg = dual_volume(field, spec.density(), spec.case_tag());
  if (auto q = spec.density().radial_exponent()) {
    return std::pow(target / vg, 1.0 / *q);  // Vg(sK) = s^q Vg(K), either sign of q
  }
  auto excess = [&](double s) {
    std::vector<double> sh(field.h().begin(), field.h().end());
    for (double& v : sh) v *= s;
    return dual_volume(SupportField(field.grid_ptr(), std::move(sh)), spec.density(), spec.case_tag()) - target;
  };
  const double dir = spec.case_tag() == CaseTag::case1 ? 1.0 : -1.0;
  double lo = 1.0, hi = 1.0;
  double flo = vg - target, fhi = flo;
  for (int k = 0; k < 200 && dir * flo > 0.0; ++k) flo = excess(lo *= 0.5);
  for (int k = 0; k < 200 && dir * fhi < 0.0; ++k) fhi = excess(hi *= 2.0);
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (dir * excess(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

FlowState step_impl(const FlowState& state, const std::vector<double>& k1, const ProblemSpec& spec,
                    const FlowConfig& config, FlowTrace* trace) {
  const auto& grid = spec.grid_ptr();
  const std::size_t n = state.field.size();
  const auto h = state.field.h();
  std::vector<double> mid(n), cand(n), dh_s(n), d2h_s(n);
  double dt = state.dt > 0.0 ? state.dt : config.dt_init;
  std::size_t streak = state.accept_streak;
  // Both stages see the normalization of the starting field; k1 was built from
  // it, so the step uses one eta evaluation and the stages differ only in h.
  const double eta_0 = eta(state.field, spec).value;

  for (;;) {
    try {
      for (std::size_t i = 0; i < n; ++i) mid[i] = h[i] + 0.5 * dt * k1[i];
      check_guards(*grid, mid, dh_s, d2h_s);
      const std::vector<double> k2 = velocity_with_eta(SupportField(grid, mid), spec, eta_0);
      for (std::size_t i = 0; i < n; ++i) cand[i] = h[i] + dt * k2[i];
      check_guards(*grid, cand, dh_s, d2h_s);

      SupportField next = SupportField(grid, cand).symmetrized();
      if (config.renormalize == FlowConfig::Renormalize::dual_volume) {
        const double s = renorm_scale(next, spec, state.dual_volume_target);
        std::vector<double> sh(next.h().begin(), next.h().end());
        for (double& v : sh) v *= s;
        next = SupportField(grid, std::move(sh));
      }

      const FunctionalReport rep = evaluate_functionals(next, spec);
      const double slack = config.tol_energy * (1.0 + std::fabs(state.report.energy));
      const bool wrong = spec.case_tag() == CaseTag::case1 ? rep.energy > state.report.energy + slack
                                                           : rep.energy < state.report.energy - slack;
      if (wrong) throw GuardReject{Guard::energy_direction, 0};

      ++streak;
      double dt_next = dt;
      if (streak % 5 == 0 && stable_at(state.field, k1, dt * config.safety)) {
        dt_next = std::min(dt * config.safety, config.dt_max);
      }
      return FlowState{state.t + dt, std::move(next),          rep,           state.steps + 1,
                       dt_next,      streak,                   state.dual_volume_target,
                       dt};
    } catch (const ConvexityLoss& loss) {
      if (trace) trace->rejections.push_back({state.steps + 1, state.t, dt, Guard::convexity, loss.node});
    } catch (const GuardReject& reject) {
      if (trace) trace->rejections.push_back({state.steps + 1, state.t, dt, reject.guard, reject.node});
    }
    streak = 0;
    dt *= 0.5;
    if (dt < config.dt_min) {
      const Guard g = trace && !trace->rejections.empty() ? trace->rejections.back().guard : Guard::convexity;
      throw StepFailure(g, dt);
    }
  }
}

TraceRecord record_of(const FlowState& state, const ProblemSpec& spec, double velocity_sup) {
  const SupportField& field = state.field;
  TraceRecord r;
  r.step = state.steps;
  r.t = state.t;
  r.dt = state.last_dt;
  r.eta = state.report.eta;
  r.energy = state.report.energy;
  r.dual_volume = state.report.dual_volume;
  r.h_min = field.h_min();
  r.h_max = field.h_max();
  r.radius_min = field.radius_min();
  r.radius_max = field.radius_max();
  const auto det = field.det_b();
  double det_min = det[0];
  for (double v : det) det_min = std::min(det_min, v);
  r.curvature_max = 1.0 / det_min;
  r.grad_max = field.grad_sup();
  r.residual_sup = residual(field, spec).residual_sup;
  r.energy_gap = energy_rate_identity(field, spec).gap;
  r.velocity_sup = velocity_sup;
  return r;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void FlowConfig::validate() const {
  if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max)) {
    throw std::invalid_argument("flow config: need 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(tol_conv > 0.0)) throw std::invalid_argument("flow config: tol_conv must be positive");
  if (!(safety >= 1.0)) throw std::invalid_argument("flow config: safety factor must be >= 1");
  if (!(tol_energy >= 0.0)) throw std::invalid_argument("flow config: tol_energy must be >= 0");
}

const char* to_string(Guard g) noexcept {
  switch (g) {
    case Guard::convexity:
      return "convexity";
    case Guard::positivity:
      return "positivity";
    default:
      return "energy-direction";
  }
}

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::max_steps:
      return "max-steps";
    default:
      return "step-failed";
  }
}

StepFailure::StepFailure(Guard g, double dt_in)
    : std::runtime_error(std::string("step size fell below dt_min after repeated ") + to_string(g) +
                         " rejections (dt = " + std::to_string(dt_in) + ")"),
      guard(g),
      dt(dt_in) {}

std::vector<double> velocity(const SupportField& field, const ProblemSpec& spec) {
  if (field.size() != spec.grid().size() || field.grid().dim() != spec.grid().dim()) {
    throw std::invalid_argument("velocity: field grid does not match problem grid");
  }
  return velocity_with_eta(field, spec, eta(field, spec).value);
}

FlowState make_state(SupportField field, const ProblemSpec& spec) {
  if (field.size() != spec.grid().size() || field.grid().dim() != spec.grid().dim()) {
    throw std::invalid_argument("make_state: field grid does not match problem grid");
  }
  if (!field.is_even(1e-12)) throw std::invalid_argument("make_state: initial field is not even");
  SupportField sym = field.symmetrized();
  sym.det_b();  // uniform convexity; throws ConvexityLoss otherwise
  const FunctionalReport rep = evaluate_functionals(sym, spec);
  return FlowState{0.0, std::move(sym), rep, 0, 0.0, 0, rep.dual_volume, 0.0};
}

FlowState step(const FlowState& state, const ProblemSpec& spec, const FlowConfig& config, FlowTrace* trace) {
  config.validate();
  return step_impl(state, velocity(state.field, spec), spec, config, trace);
}

RunResult run(const ProblemSpec& spec, const SupportField& initial, const FlowConfig& config,
              const std::function<void(const FlowState&)>& observer) {
  config.validate();
  FlowState state = make_state(initial, spec);
  FlowTrace trace;
  RunStatus status = RunStatus::max_steps;
  std::string failure;

  for (;;) {
    const std::vector<double> v = velocity(state.field, spec);
    double vsup = 0.0;
    for (double x : v) vsup = std::max(vsup, std::fabs(x));
    trace.records.push_back(record_of(state, spec, vsup));
    if (observer) observer(state);
    if (vsup <= config.tol_conv * state.field.h_max()) {
      status = RunStatus::converged;
      break;
    }
    if (state.steps >= config.max_steps) {
      status = RunStatus::max_steps;
      break;
    }
    try {
      state = step_impl(state, v, spec, config, &trace);
    } catch (const StepFailure& e) {
      status = RunStatus::step_failed;
      failure = e.what();
      break;
    }
  }

  RunResult out{status, std::move(state), std::move(trace), 0.0, std::move(failure)};
  out.residual_final = out.trace.records.back().residual_sup;
  return out;
}

SupportField make_initial(const Shape& shape, std::shared_ptr<const SphericalGrid> grid) {
  if (!grid) throw std::invalid_argument("make_initial: null grid");
  const std::size_t n = grid->size();
  std::vector<double> h(n);

  std::visit(
      overloaded{
          [&](const Ball& b) {
            if (!(b.r > 0.0)) throw std::invalid_argument("ball radius must be positive");
            std::fill(h.begin(), h.end(), b.r);
          },
          [&](const Ellipse& e) {
            if (grid->dim() != 2) throw std::invalid_argument("ellipse shape needs the circle grid");
            if (!(e.a > 0.0) || !(e.b > 0.0)) throw std::invalid_argument("ellipse axes must be positive");
            for (std::size_t i = 0; i < n; ++i) {
              const double c = grid->cos_theta()[i], s = grid->sin_theta()[i];
              h[i] = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
            }
          },
          [&](const Ellipsoid& e) {
            if (grid->dim() != 3) throw std::invalid_argument("ellipsoid shape needs the axisymmetric grid");
            if (!(e.a > 0.0) || !(e.c > 0.0)) throw std::invalid_argument("ellipsoid axes must be positive");
            for (std::size_t i = 0; i < n; ++i) {
              const double c = grid->cos_theta()[i], s = grid->sin_theta()[i];
              h[i] = std::sqrt(e.a * e.a * s * s + e.c * e.c * c * c);
            }
          },
          [&](const Perturbed& p) {
            for (std::size_t i = 0; i < n; ++i) {
              double v = 1.0;
              for (std::size_t k = 0; k < p.eps.size(); ++k) {
                v += p.eps[k] * std::cos(2.0 * static_cast<double>(k + 1) * grid->theta()[i]);
              }
              h[i] = v;
            }
          },
          [&](const RandomPerturbed& rp) {
            if (rp.modes < 0 || !(rp.amp >= 0.0)) {
              throw std::invalid_argument("random perturbation needs modes >= 0 and amp >= 0");
            }
            std::mt19937_64 eng(rp.seed);
            std::uniform_real_distribution<double> dist(-rp.amp, rp.amp);
            std::vector<double> eps(static_cast<std::size_t>(rp.modes));
            for (double& e : eps) e = dist(eng);
            for (std::size_t i = 0; i < n; ++i) {
              double v = 1.0;
              for (std::size_t k = 0; k < eps.size(); ++k) {
                v += eps[k] * std::cos(2.0 * static_cast<double>(k + 1) * grid->theta()[i]);
              }
              h[i] = v;
            }
          },
      },
      shape);

  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) throw NotConvex(i);
  }
  SupportField field(std::move(grid), std::move(h));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(field.lambda1()[i] > 0.0)) throw NotConvex(i);
    if (field.grid().dim() == 3 && !(field.lambda2()[i] > 0.0)) throw NotConvex(i);
  }
  return field.symmetrized();
}

}  // namespace dualflow
