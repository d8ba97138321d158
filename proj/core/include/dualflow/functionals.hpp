#pragma once

#include <dualflow/field.hpp>
#include <dualflow/orlicz.hpp>

namespace dualflow {

// The scalar quantities steering the flow, evaluated on one field.
struct FunctionalReport {
  double dual_volume = 0.0;      // case1: integral of G over the body; case2: over its complement
  double energy = 0.0;           // integral of Phi(h) f over the sphere
  double eta = 0.0;              // eta_numerator / eta_denominator
  double eta_numerator = 0.0;    // integral of G(boundary) h det b
  double eta_denominator = 0.0;  // integral of f h / phi(h)
  double volume = 0.0;           // ordinary volume of the body
};

// Sphere integrals of per-direction radial integrals are evaluated on the
// h-grid through the substitution weight h det b / rho^n; rho and the
// boundary direction come from the field itself.
double dual_volume(const SupportField& field, const DualDensity& density, CaseTag tag);

// G at the boundary point of node i.
double density_at_boundary(const SupportField& field, const DualDensity& density, std::size_t i);

struct EtaParts {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};
EtaParts eta(const SupportField& field, const ProblemSpec& spec);

double orlicz_energy(const SupportField& field, const ProblemSpec& spec);

FunctionalReport evaluate_functionals(const SupportField& field, const ProblemSpec& spec);

// Exact time derivative of the energy under the flow, obtained from the
// integral identity rather than from finite differences, together with the
// gap of the Cauchy-Schwarz inequality that forces its sign. gap >= 0 up to
// quadrature roundoff; rate <= 0 in case1 and >= 0 in case2.
struct EnergyRate {
  double rate = 0.0;
  double gap = 0.0;
};
EnergyRate energy_rate_identity(const SupportField& field, const ProblemSpec& spec);

// lhs = integral of h det b; rhs = n Vol(K) with the volume computed through
// the same substitution machinery (unit density). Their relative gap probes
// the pullback plumbing end to end.
struct VolumeIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};
VolumeIdentity volume_identity(const SupportField& field);

}  // namespace dualflow
