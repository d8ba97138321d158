#include <dualflow/functionals.hpp>

#include <array>
#include <cmath>
#include <limits>

#include "numutil.hpp"

namespace dualflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double density_at_boundary(const SupportField& field, const DualDensity& density, std::size_t i) {
  if (density.is_radial()) return density.eval_radial(field.rho()[i]);
  std::array<double, 3> pt{};
  std::span<double> p(pt.data(), static_cast<std::size_t>(density.dim()));
  field.boundary_point(i, p);
  return density.eval(p);
}

double dual_volume(const SupportField& field, const DualDensity& density, CaseTag tag) {
  if (density.dim() != field.grid().dim()) throw std::invalid_argument("dual_volume: dimension mismatch");
  const std::size_t n = field.size();
  const int dim = density.dim();
  const auto det = field.det_b();
  const auto h = field.h();
  const auto rho = field.rho();
  std::vector<double> vals(n);
  std::array<double, 3> pt{};
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = (tag == CaseTag::case1) ? 0.0 : rho[i];
    const double hi = (tag == CaseTag::case1) ? rho[i] : kInf;
    double cell;
    if (density.is_radial()) {
      cell = density.cell_integral(lo, hi);
    } else {
      std::span<double> p(pt.data(), static_cast<std::size_t>(dim));
      field.boundary_point(i, p);
      for (auto& c : p) c /= rho[i];
      cell = density.cell_integral(p, lo, hi);
    }
    vals[i] = cell * h[i] * det[i] / detail::pow_real(rho[i], dim);
  }
  return field.grid().integrate(vals);
}

EtaParts eta(const SupportField& field, const ProblemSpec& spec) {
  const std::size_t n = field.size();
  const auto det = field.det_b();
  const auto h = field.h();
  const auto f = spec.f();
  std::vector<double> num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    num[i] = density_at_boundary(field, spec.density(), i) * h[i] * det[i];
    den[i] = f[i] * h[i] / spec.weight().eval(h[i]);
  }
  EtaParts out;
  out.numerator = field.grid().integrate(num);
  out.denominator = field.grid().integrate(den);
  out.value = out.numerator / out.denominator;
  return out;
}

double orlicz_energy(const SupportField& field, const ProblemSpec& spec) {
  const std::size_t n = field.size();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = spec.weight().antiderivative(spec.case_tag(), field.h()[i]) * spec.f()[i];
  }
  return field.grid().integrate(vals);
}

FunctionalReport evaluate_functionals(const SupportField& field, const ProblemSpec& spec) {
  FunctionalReport r;
  r.dual_volume = dual_volume(field, spec.density(), spec.case_tag());
  const EtaParts e = eta(field, spec);
  r.eta = e.value;
  r.eta_numerator = e.numerator;
  r.eta_denominator = e.denominator;
  r.energy = orlicz_energy(field, spec);
  r.volume = volume_identity(field).rhs / field.grid().dim();
  return r;
}

EnergyRate energy_rate_identity(const SupportField& field, const ProblemSpec& spec) {
  const std::size_t n = field.size();
  const auto det = field.det_b();
  const auto h = field.h();
  const auto f = spec.f();
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = density_at_boundary(field, spec.density(), i);
    const double phi = spec.weight().eval(h[i]);
    a[i] = g * h[i] * det[i];
    b[i] = f[i] * f[i] * h[i] / (phi * phi * g * det[i]);
    c[i] = f[i] * h[i] / phi;
  }
  const double ia = field.grid().integrate(a);
  const double ib = field.grid().integrate(b);
  const double ic = field.grid().integrate(c);
  EnergyRate out;
  out.gap = ia * ib - ic * ic;
  out.rate = (spec.case_tag() == CaseTag::case1 ? -out.gap : out.gap) / ic;
  return out;
}

VolumeIdentity volume_identity(const SupportField& field) {
  const int dim = field.grid().dim();
  const std::size_t n = field.size();
  const auto det = field.det_b();
  const auto h = field.h();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = h[i] * det[i];
  VolumeIdentity out;
  out.lhs = field.grid().integrate(vals);
  out.rhs = dim * dual_volume(field, DualDensity::radial_power(dim, dim), CaseTag::case1);
  out.gap = std::fabs(out.lhs - out.rhs) / std::fabs(out.rhs);
  return out;
}

}  // namespace dualflow
