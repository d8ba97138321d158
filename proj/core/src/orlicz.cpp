#include <dualflow/orlicz.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "numutil.hpp"

namespace dualflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed-form integral over [a, b] of C * r^E dr, with b possibly infinite
// and a possibly 0. Throws DomainError when the integral diverges.
double power_integral(double coeff, double expo, double a, double b) {
  if (a == b) return 0.0;
  const double e1 = expo + 1.0;
  if (b == kInf) {
    if (e1 >= 0.0) throw DomainError("power integral diverges at infinity");
    return coeff * (-std::pow(a, e1)) / e1;
  }
  if (std::fabs(e1) < 1e-14) {
    if (a == 0.0) throw DomainError("power integral diverges at 0");
    return coeff * std::log(b / a);
  }
  if (a == 0.0) {
    if (e1 <= 0.0) throw DomainError("power integral diverges at 0");
    return coeff * std::pow(b, e1) / e1;
  }
  return coeff * (std::pow(b, e1) - std::pow(a, e1)) / e1;
}

// Log-log piecewise-linear table: every segment, and the extension beyond
// either end, is an exact power law c * s^alpha. That makes point evaluation,
// improper integrals, and the panel-sum case checks exact for the
// representation.
struct LogLogTable {
  std::vector<double> s, v, log_s, log_v, slope;  // slope[j] on [s_j, s_j+1]

  LogLogTable(std::vector<double> s_in, std::vector<double> v_in) : s(std::move(s_in)), v(std::move(v_in)) {
    if (s.size() < 2 || s.size() != v.size()) throw std::invalid_argument("table needs >= 2 matching samples");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(s[i] > 0.0) || !(v[i] > 0.0)) throw std::invalid_argument("table entries must be positive");
      if (i > 0 && !(s[i] > s[i - 1])) throw std::invalid_argument("table abscissae must be strictly increasing");
      log_s.push_back(std::log(s[i]));
      log_v.push_back(std::log(v[i]));
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      slope.push_back((log_v[i + 1] - log_v[i]) / (log_s[i + 1] - log_s[i]));
    }
  }

  bool in_range(double x) const { return x >= s.front() && x <= s.back(); }

  // Segment index whose power law governs x, extensions included.
  std::size_t segment(double x) const {
    if (x <= s.front()) return 0;
    if (x >= s.back()) return slope.size() - 1;
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    return static_cast<std::size_t>(it - s.begin()) - 1;
  }

  double eval_extended(double x) const {
    const std::size_t j = segment(x);
    return std::exp(log_v[j] + slope[j] * (std::log(x) - log_s[j]));
  }

  // Integral over [a, b] of (table value)^sign * r^extra dr, extensions
  // included, a may be 0 and b may be +inf. Exact per segment.
  double integral(double a, double b, int sign, double extra) const {
    if (!(a >= 0.0) || b < a) throw DomainError("bad integration range");
    if (a == b) return 0.0;
    long double acc = 0.0L;
    // Breakpoints: knots strictly inside (a, b).
    double lo = a;
    for (std::size_t k = 0; k <= s.size(); ++k) {
      const double knot = (k < s.size()) ? s[k] : kInf;
      const double hi = std::min(b, knot);
      if (hi > lo) {
        const double mid = (hi == kInf) ? lo * 2.0 : 0.5 * (lo + hi);
        const std::size_t j = segment(mid);
        // value^sign = (c s^alpha)^sign: coefficient from the anchor knot.
        const double alpha = slope[j] * sign;
        const double coeff = std::exp(sign * (log_v[j] - slope[j] * log_s[j]));
        acc += power_integral(coeff, alpha + extra, lo, hi);
        lo = hi;
      }
      if (lo >= b) break;
    }
    return static_cast<double>(acc);
  }
};

// Panel-sum integrability probe: increments over [2^-(k+1), 2^-k] toward 0,
// or [2^k, 2^(k+1)] toward infinity, k up to 40; the final increment ratio
// decides convergence (geometric decay) vs divergence (flat or growing).
bool panels_converge(const std::function<double(double, double)>& segment_integral, bool toward_zero) {
  double prev = 0.0, ratio = 1.0;
  for (int k = 0; k <= 40; ++k) {
    const double hi = toward_zero ? std::ldexp(1.0, -k) : std::ldexp(1.0, k + 1);
    const double lo = toward_zero ? 0.5 * hi : 0.5 * hi;
    const double d = segment_integral(lo, hi);
    if (k >= 35 && prev > 0.0) ratio = std::min(ratio, d / prev);
    prev = d;
  }
  return ratio < 1.0 - 1e-9;
}

}  // namespace

const char* to_string(CaseTag tag) noexcept { return tag == CaseTag::case1 ? "case1" : "case2"; }

// ---------------------------------------------------------------------------
// OrliczWeight

struct OrliczWeight::Impl {
  enum class Kind { power, tabulated } kind;
  double p = 0.0;
  std::optional<LogLogTable> table;
  QuadratureParams params;
  bool integrable_zero = false, integrable_inf = false;
  // Tail pieces of the antiderivative, cached once (table kind only).
  double from_zero_to_front = 0.0, from_back_to_inf = 0.0;
};

OrliczWeight OrliczWeight::power_law(double p) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::power;
  impl->p = p;
  impl->integrable_zero = p > 0.0;  // 1/phi = s^(p-1)
  impl->integrable_inf = p < 0.0;
  return OrliczWeight(std::move(impl));
}

OrliczWeight OrliczWeight::tabulated(std::vector<double> s, std::vector<double> phi, std::optional<CaseTag> declared,
                                     QuadratureParams params) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::tabulated;
  impl->params = params;
  impl->table.emplace(std::move(s), std::move(phi));
  const LogLogTable& t = *impl->table;
  impl->integrable_zero = panels_converge([&](double a, double b) { return t.integral(a, b, -1, 0.0); }, true);
  impl->integrable_inf = panels_converge([&](double a, double b) { return t.integral(a, b, -1, 0.0); }, false);
  if (impl->integrable_zero) impl->from_zero_to_front = t.integral(0.0, t.s.front(), -1, 0.0);
  if (impl->integrable_inf) impl->from_back_to_inf = t.integral(t.s.back(), kInf, -1, 0.0);
  if (declared) {
    const bool ok = (*declared == CaseTag::case1) ? (impl->integrable_zero && !impl->integrable_inf)
                                                  : impl->integrable_inf;
    if (!ok) {
      throw CaseMismatch(std::string("tabulated weight contradicts declared ") + to_string(*declared) +
                         ": panel sums find 1/phi " + (impl->integrable_zero ? "integrable" : "non-integrable") +
                         " at 0 and " + (impl->integrable_inf ? "integrable" : "non-integrable") + " at infinity");
    }
  }
  return OrliczWeight(std::move(impl));
}

double OrliczWeight::eval(double s) const {
  if (!(s > 0.0)) throw DomainError("phi is defined on s > 0");
  if (impl_->kind == Impl::Kind::power) return detail::pow_real(s, 1.0 - impl_->p);
  if (!impl_->table->in_range(s)) throw DomainError("s outside tabulated weight range");
  return impl_->table->eval_extended(s);
}

double OrliczWeight::antiderivative(CaseTag tag, double s) const {
  if (!(s > 0.0)) throw DomainError("antiderivative is defined on s > 0");
  if (impl_->kind == Impl::Kind::power) {
    const double p = impl_->p;
    if (tag == CaseTag::case1) {
      if (!(p > 0.0)) throw DomainError("case1 antiderivative diverges for p <= 0");
      return detail::pow_real(s, p) / p;
    }
    if (!(p < 0.0)) throw DomainError("case2 antiderivative diverges for p >= 0");
    return detail::pow_real(s, p) / (-p);
  }
  const LogLogTable& t = *impl_->table;
  if (tag == CaseTag::case1) {
    if (!impl_->integrable_zero) throw QuadratureFailure("1/phi is not integrable at 0; case1 antiderivative diverges");
    if (s <= t.s.front()) return t.integral(0.0, s, -1, 0.0);
    return impl_->from_zero_to_front + t.integral(t.s.front(), s, -1, 0.0);
  }
  if (!impl_->integrable_inf) {
    throw QuadratureFailure("1/phi is not integrable at infinity; case2 antiderivative diverges");
  }
  if (s >= t.s.back()) return t.integral(s, kInf, -1, 0.0);
  return impl_->from_back_to_inf + t.integral(s, t.s.back(), -1, 0.0);
}

bool OrliczWeight::reciprocal_integrable_at_zero() const { return impl_->integrable_zero; }
bool OrliczWeight::reciprocal_integrable_at_infinity() const { return impl_->integrable_inf; }

std::optional<double> OrliczWeight::power() const {
  if (impl_->kind == Impl::Kind::power) return impl_->p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DualDensity

struct DualDensity::Impl {
  enum class Kind { power, rtable, rcallable, general } kind;
  int dim = 2;
  double q = 0.0;
  std::optional<LogLogTable> table;
  std::function<double(double)> g;
  std::optional<std::function<double(double)>> primitive, rtail;
  std::function<double(std::span<const double>)> G;
  std::optional<std::function<double(std::span<const double>, double)>> gtail;
  Integrability tags{false, false};
};

namespace {

double norm_of(std::span<const double> y) {
  double acc = 0.0;
  for (double c : y) acc += c * c;
  return std::sqrt(acc);
}

// Quadrature of g(r) r^(n-1) over a finite span, for callable kinds.
double callable_span_integral(const std::function<double(double)>& integrand, double a, double b) {
  try {
    return detail::AdaptiveSimpson(integrand, 1e-10).integrate(a, b);
  } catch (const std::runtime_error& e) {
    throw QuadratureFailure(e.what());
  }
}

DualDensity::Integrability probe_integrability(const std::function<double(double)>& integrand) {
  auto seg = [&](double a, double b) {
    try {
      return detail::AdaptiveSimpson(integrand, 1e-6).integrate(a, b);
    } catch (const std::runtime_error& e) {
      throw QuadratureFailure(e.what());
    }
  };
  const bool inside = panels_converge(seg, true);
  const bool outside = panels_converge(seg, false);
  return {inside, outside};
}

}  // namespace

DualDensity DualDensity::radial_power(int dim, double q) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("density dim must be 2 or 3");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::power;
  impl->dim = dim;
  impl->q = q;
  impl->tags = {q > 0.0, q < 0.0};  // integrand along a ray is r^(q-1)
  return DualDensity(std::move(impl));
}

DualDensity DualDensity::radial_table(int dim, std::vector<double> r, std::vector<double> g) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("density dim must be 2 or 3");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::rtable;
  impl->dim = dim;
  impl->table.emplace(std::move(r), std::move(g));
  const LogLogTable& t = *impl->table;
  const double extra = static_cast<double>(dim - 1);
  impl->tags.finite_inside_unit_ball =
      panels_converge([&](double a, double b) { return t.integral(a, b, +1, extra); }, true);
  impl->tags.finite_outside_unit_ball =
      panels_converge([&](double a, double b) { return t.integral(a, b, +1, extra); }, false);
  return DualDensity(std::move(impl));
}

DualDensity DualDensity::radial_callable(int dim, std::function<double(double)> g,
                                         std::optional<std::function<double(double)>> primitive,
                                         std::optional<std::function<double(double)>> tail) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("density dim must be 2 or 3");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::rcallable;
  impl->dim = dim;
  impl->g = std::move(g);
  impl->primitive = std::move(primitive);
  impl->rtail = std::move(tail);
  const int n = dim;
  auto gg = impl->g;
  impl->tags = probe_integrability([gg, n](double r) { return gg(r) * detail::pow_real(r, n - 1); });
  return DualDensity(std::move(impl));
}

DualDensity DualDensity::general(int dim, std::function<double(std::span<const double>)> G, Integrability declared,
                                 std::optional<std::function<double(std::span<const double>, double)>> tail) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("density dim must be 2 or 3");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::general;
  impl->dim = dim;
  impl->G = std::move(G);
  impl->gtail = std::move(tail);
  impl->tags = declared;

  // Spot-check evenness and the declared integrability along probe rays.
  std::vector<std::vector<double>> probes;
  if (dim == 2) {
    probes = {{1.0, 0.0}, {std::sqrt(0.5), std::sqrt(0.5)}, {0.3, -0.9539392014169456}};
  } else {
    probes = {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {std::sqrt(1.0 / 3), std::sqrt(1.0 / 3), std::sqrt(1.0 / 3)}};
  }
  for (const auto& u : probes) {
    for (double r : {0.5, 1.0, 2.3}) {
      std::vector<double> yp(u), ym(u);
      for (std::size_t i = 0; i < u.size(); ++i) {
        yp[i] *= r;
        ym[i] *= -r;
      }
      const double a = impl->G(yp), b = impl->G(ym);
      if (!(a > 0.0)) throw std::invalid_argument("density callable must be positive");
      if (std::fabs(a - b) > 1e-12 * std::max(1.0, std::fabs(a))) {
        throw std::invalid_argument("density callable is not even");
      }
      if (dim == 3) {
        // The polar-angle grid represents each azimuth orbit by one point, so
        // a callable density must be invariant under rotations about the axis.
        const std::vector<double> rot1{-yp[0], -yp[1], yp[2]};
        const std::vector<double> rot2{-yp[1], yp[0], yp[2]};
        if (std::fabs(impl->G(rot1) - a) > 1e-12 * std::max(1.0, std::fabs(a)) ||
            std::fabs(impl->G(rot2) - a) > 1e-12 * std::max(1.0, std::fabs(a))) {
          throw std::invalid_argument("dim-3 density callable must be axisymmetric");
        }
      }
    }
    auto Gfn = impl->G;
    const int n = dim;
    auto ray = [Gfn, u, n](double r) {
      std::vector<double> y(u);
      for (double& c : y) c *= r;
      return Gfn(y) * detail::pow_real(r, n - 1);
    };
    const Integrability found = probe_integrability(ray);
    if (found.finite_inside_unit_ball != declared.finite_inside_unit_ball ||
        found.finite_outside_unit_ball != declared.finite_outside_unit_ball) {
      throw CaseMismatch("density callable contradicts its declared integrability along a probe ray");
    }
  }
  return DualDensity(std::move(impl));
}

int DualDensity::dim() const { return impl_->dim; }

bool DualDensity::is_radial() const { return impl_->kind != Impl::Kind::general; }

std::optional<double> DualDensity::radial_exponent() const {
  if (impl_->kind == Impl::Kind::power) return impl_->q;
  return std::nullopt;
}

double DualDensity::eval(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != impl_->dim) throw DomainError("density point has wrong dimension");
  if (impl_->kind == Impl::Kind::general) {
    if (norm_of(y) == 0.0) throw DomainError("density undefined at the origin");
    return impl_->G(y);
  }
  return eval_radial(norm_of(y));
}

double DualDensity::eval_radial(double r) const {
  if (!(r > 0.0)) throw DomainError("density undefined at the origin");
  switch (impl_->kind) {
    case Impl::Kind::power:
      return detail::pow_real(r, impl_->q - impl_->dim);
    case Impl::Kind::rtable:
      return impl_->table->eval_extended(r);
    case Impl::Kind::rcallable:
      return impl_->g(r);
    default:
      throw DomainError("general density has no radial form");
  }
}

double DualDensity::cell_integral(double r_lo, double r_hi) const {
  if (!(r_lo >= 0.0) || r_hi < r_lo) throw DomainError("bad radial span");
  if (r_lo == r_hi) return 0.0;
  const int n = impl_->dim;
  switch (impl_->kind) {
    case Impl::Kind::power:
      // integrand r^(q-1)
      return power_integral(1.0, impl_->q - 1.0, r_lo, r_hi);
    case Impl::Kind::rtable:
      if (r_hi == kInf && !impl_->tags.finite_outside_unit_ball) {
        throw TailUnavailable("tabulated density has a divergent tail");
      }
      return impl_->table->integral(r_lo, r_hi, +1, static_cast<double>(n - 1));
    case Impl::Kind::rcallable: {
      if (r_hi == kInf) {
        if (!impl_->rtail) throw TailUnavailable("radial density has no tail primitive");
        return (*impl_->rtail)(r_lo);
      }
      if (impl_->primitive) return (*impl_->primitive)(r_hi) - (*impl_->primitive)(r_lo);
      auto g = impl_->g;
      return callable_span_integral([g, n](double r) { return g(r) * detail::pow_real(r, n - 1); }, r_lo, r_hi);
    }
    default:
      throw DomainError("general density needs a direction for cell integrals");
  }
}

double DualDensity::cell_integral(std::span<const double> unit_dir, double r_lo, double r_hi) const {
  if (impl_->kind != Impl::Kind::general) return cell_integral(r_lo, r_hi);
  if (static_cast<int>(unit_dir.size()) != impl_->dim) throw DomainError("direction has wrong dimension");
  if (!(r_lo >= 0.0) || r_hi < r_lo) throw DomainError("bad radial span");
  if (r_lo == r_hi) return 0.0;
  if (r_hi == kInf) {
    if (!impl_->gtail) throw TailUnavailable("general density has no per-direction tail");
    return (*impl_->gtail)(unit_dir, r_lo);
  }
  auto G = impl_->G;
  std::vector<double> dir(unit_dir.begin(), unit_dir.end());
  const int n = impl_->dim;
  auto ray = [G, dir, n](double r) {
    std::vector<double> y(dir);
    for (double& c : y) c *= r;
    return G(y) * detail::pow_real(r, n - 1);
  };
  if (r_lo == 0.0) {
    // Integrable singularity allowed at the origin: geometric panels downward.
    try {
      detail::AdaptiveSimpson quad(ray, 1e-10);
      return detail::panel_series(quad, r_hi, true, 1e-10);
    } catch (const std::runtime_error& e) {
      throw QuadratureFailure(e.what());
    }
  }
  return callable_span_integral(ray, r_lo, r_hi);
}

DualDensity::Integrability DualDensity::integrability() const { return impl_->tags; }

// ---------------------------------------------------------------------------
// Case classification

CaseTag classify_case(const OrliczWeight& weight, const DualDensity& density) {
  const auto tags = density.integrability();
  const bool w0 = weight.reciprocal_integrable_at_zero();
  const bool winf = weight.reciprocal_integrable_at_infinity();

  if (w0 && !winf && tags.finite_inside_unit_ball) return CaseTag::case1;
  if (winf && !tags.finite_inside_unit_ball && tags.finite_outside_unit_ball) return CaseTag::case2;

  std::ostringstream msg;
  msg << "weight/density pair fits neither case:";
  if (!w0) {
    msg << " case1 needs 1/phi integrable at 0;";
  } else if (winf) {
    msg << " case1 needs 1/phi non-integrable at infinity;";
  } else {
    msg << " case1 needs the density integrable over the unit ball;";
  }
  if (!winf) {
    msg << " case2 needs 1/phi integrable at infinity";
  } else if (tags.finite_inside_unit_ball) {
    msg << " case2 needs the density non-integrable over the unit ball";
  } else {
    msg << " case2 needs the density integrable outside the unit ball";
  }
  throw CaseMismatch(msg.str());
}

// ---------------------------------------------------------------------------
// ProblemSpec

ProblemSpec::ProblemSpec(std::shared_ptr<const SphericalGrid> grid, OrliczWeight weight, DualDensity density,
                         std::vector<double> f)
    : grid_(std::move(grid)),
      weight_(std::move(weight)),
      density_(std::move(density)),
      case_(classify_case(weight_, density_)),
      f_(std::move(f)) {
  if (!grid_) throw std::invalid_argument("ProblemSpec: null grid");
  if (density_.dim() != grid_->dim()) throw std::invalid_argument("ProblemSpec: density/grid dimension mismatch");
  if (f_.size() != grid_->size()) throw std::invalid_argument("ProblemSpec: f sample count mismatch");
  for (std::size_t i = 0; i < f_.size(); ++i) {
    if (!(f_[i] > 0.0)) throw std::invalid_argument("ProblemSpec: f must be positive everywhere");
  }
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const std::size_t j = grid_->antipode(i);
    if (std::fabs(f_[i] - f_[j]) > 1e-12 * std::max(1.0, std::fabs(f_[i]))) {
      throw std::invalid_argument("ProblemSpec: f is not even under the antipodal map");
    }
  }
  // Make evenness exact so every derived quantity is antipodally bit-stable.
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const std::size_t j = grid_->antipode(i);
    if (i < j) {
      const double m = 0.5 * (f_[i] + f_[j]);
      f_[i] = m;
      f_[j] = m;
    }
  }
}

}  // namespace dualflow
