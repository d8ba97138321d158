#pragma once

#include <dualflow/grid.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualflow {

class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class QuadratureFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A density was asked for an integral to infinity it cannot provide.
class TailUnavailable : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The weight/density pair satisfies neither admissible set of integrability
// conditions, or contradicts a declared case.
class CaseMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which set of integrability conditions the problem lives under.
//
// case1: 1/phi integrable at 0, not integrable at infinity, and the density
//        integrable over the unit ball. The stationary equation is solved by
//        bodies of finite dual volume Int_K G.
// case2: 1/phi integrable at infinity, the density non-integrable over the
//        unit ball but integrable over its complement; the dual volume is
//        Int_{R^n \ K} G.
enum class CaseTag { case1, case2 };

const char* to_string(CaseTag tag) noexcept;

// Weight phi: (0, inf) -> (0, inf), continuous. Either the power law
// phi(s) = s^(1-p) or a tabulated positive function interpolated log-log
// piecewise-linearly (each table segment is a power law; the boundary
// segments extend the table toward 0 and infinity for antiderivative
// quadrature only).
struct QuadratureParams {
  double rel_tol = 1e-10;
  int max_panels = 2000;
};

class OrliczWeight {
public:
  static OrliczWeight power_law(double p);
  // s strictly increasing, all entries of s and phi positive. If declared is
  // set, the numerically detected integrability must agree with it.
  static OrliczWeight tabulated(std::vector<double> s, std::vector<double> phi,
                                std::optional<CaseTag> declared = std::nullopt,
                                QuadratureParams params = QuadratureParams());

  // phi(s). DomainError if s <= 0 or, for tabulated weights, s is off-table.
  double eval(double s) const;

  // Phi(s): case1 integral_0^s dt/phi(t) (strictly increasing),
  //         case2 integral_s^inf dt/phi(t) (strictly decreasing).
  // Closed form for power laws, adaptive quadrature with geometric panel
  // refinement toward the improper endpoint for tabulated weights.
  // QuadratureFailure when the panels do not settle, DomainError when the
  // requested case diverges for this weight (e.g. case1 with p <= 0).
  double antiderivative(CaseTag tag, double s) const;

  // Integrability of 1/phi, the weight's half of the case conditions.
  // Analytic for power laws, panel sums for tabulated weights.
  bool reciprocal_integrable_at_zero() const;
  bool reciprocal_integrable_at_infinity() const;

  std::optional<double> power() const;  // p for power-law weights

private:
  struct Impl;
  explicit OrliczWeight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Dual-volume density G on R^n minus the origin: positive, even, continuous.
//
// Kinds:
//  - radial power      G(y) = |y|^(q-n)
//  - radial table      G(y) = g(|y|), g tabulated and interpolated log-log
//  - radial callable   G(y) = g(|y|) with optional closed-form primitives
//  - general callable  even G(y), integrated by quadrature per direction
class DualDensity {
public:
  struct Integrability {
    bool finite_inside_unit_ball;   // Int_{B_1} G < inf
    bool finite_outside_unit_ball;  // Int_{R^n \ B_1} G < inf
  };

  static DualDensity radial_power(int dim, double q);
  static DualDensity radial_table(int dim, std::vector<double> r, std::vector<double> g);
  // primitive: P with P'(r) = g(r) r^(n-1); tail: T(r) = Int_r^inf g(t) t^(n-1) dt.
  // Without a tail, integrals to infinity (case2 use) throw TailUnavailable.
  static DualDensity radial_callable(int dim, std::function<double(double)> g,
                                     std::optional<std::function<double(double)>> primitive = std::nullopt,
                                     std::optional<std::function<double(double)>> tail = std::nullopt);
  // declared integrability is spot-checked by panel sums along probe
  // directions; tail(u, r) = Int_r^inf G(t u) t^(n-1) dt if available.
  static DualDensity general(int dim, std::function<double(std::span<const double>)> G, Integrability declared,
                             std::optional<std::function<double(std::span<const double>, double)>> tail = std::nullopt);

  int dim() const;
  bool is_radial() const;
  std::optional<double> radial_exponent() const;  // q for radial powers

  // G at a point of R^n (size dim). DomainError at the origin.
  double eval(std::span<const double> y) const;
  // G on a sphere of radius r (radial kinds only).
  double eval_radial(double r) const;

  // Integral over [r_lo, r_hi] of G(r u) r^(n-1) dr along the unit direction
  // u; r_hi may be +inf. Closed form for radial powers and supplied
  // primitives, adaptive quadrature otherwise. Zero-width spans return 0.
  double cell_integral(std::span<const double> unit_dir, double r_lo, double r_hi) const;
  // Radial-kind shortcut (direction irrelevant).
  double cell_integral(double r_lo, double r_hi) const;

  Integrability integrability() const;

private:
  struct Impl;
  explicit DualDensity(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Decide the case from the weight and density integrability tags; throws
// CaseMismatch naming the first failing condition of each case when the pair
// is admissible under neither.
CaseTag classify_case(const OrliczWeight& weight, const DualDensity& density);

// Everything that defines one stationary problem instance on a grid:
// solve c * phi(h) * G(grad h + h x) * det(D^2 h + h I) = f on the sphere.
class ProblemSpec {
public:
  // f: positive node samples, even under the grid antipodal map to 1e-12
  // (then symmetrized exactly so downstream evenness is bit-stable).
  ProblemSpec(std::shared_ptr<const SphericalGrid> grid, OrliczWeight weight, DualDensity density,
              std::vector<double> f);

  const SphericalGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const SphericalGrid>& grid_ptr() const noexcept { return grid_; }
  const OrliczWeight& weight() const noexcept { return weight_; }
  const DualDensity& density() const noexcept { return density_; }
  CaseTag case_tag() const noexcept { return case_; }
  const std::vector<double>& f() const noexcept { return f_; }

private:
  std::shared_ptr<const SphericalGrid> grid_;
  OrliczWeight weight_;
  DualDensity density_;
  CaseTag case_;
  std::vector<double> f_;
};

}  // namespace dualflow
