#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <dualflow/grid.hpp>

namespace dualflow {

// A curvature radius went nonpositive where the flow needs it positive.
// Carries the first offending node so step control can report it.
class ConvexityLoss : public std::runtime_error {
 public:
  ConvexityLoss(std::size_t node, double radius);
  std::size_t node;
  double radius;
};

// Initial-shape parameters describe a non-convex body.
class NotConvex : public std::runtime_error {
 public:
  explicit NotConvex(std::size_t node);
  std::size_t node;
};

// Support function samples on a spherical grid plus every derived field the
// flow and the functionals consume. Derived fields are computed once at
// construction; instances are immutable and safe to share across threads.
//
// Geometry, per node with c = cos(theta), s = sin(theta):
//   radii      n=2: lambda = h'' + h
//              n=3: lambda1 = h'' + h, lambda2 = h' cot(theta) + h
//   det b      product of the radii (n=2: lambda itself)
//   boundary   (h c - h' s, h s + h' c); for n=3 the first coordinate is
//              axial and the second is the distance from the symmetry axis
//   rho        |boundary point| = sqrt(h^2 + h'^2)
class SupportField {
 public:
  SupportField(std::shared_ptr<const SphericalGrid> grid, std::vector<double> h);

  const SphericalGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const SphericalGrid>& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return h_.size(); }

  std::span<const double> h() const noexcept { return h_; }
  std::span<const double> dh() const noexcept { return dh_; }
  std::span<const double> d2h() const noexcept { return d2h_; }
  std::span<const double> rho() const noexcept { return rho_; }

  // Raw radii; may be nonpositive for a non-convex sample set.
  std::span<const double> lambda1() const noexcept { return lambda1_; }
  // n=3 only.
  std::span<const double> lambda2() const;

  // Validating accessors: throw ConvexityLoss at the first nonpositive radius.
  std::span<const double> det_b() const;
  double gauss_curvature(std::size_t i) const;  // 1 / det_b[i]

  bool convex() const noexcept;
  double radius_min() const;  // over all radii and nodes, unvalidated
  double radius_max() const;

  double h_min() const noexcept;
  double h_max() const noexcept;
  double grad_sup() const noexcept;  // max |h'|

  // Boundary point of node i written into out (size dim()).
  void boundary_point(std::size_t i, std::span<double> out) const;

  bool is_even(double tol) const noexcept;
  SupportField symmetrized() const;  // exact antipodal pair means

 private:
  std::shared_ptr<const SphericalGrid> grid_;
  std::vector<double> h_, dh_, d2h_, lambda1_, lambda2_, det_, rho_;
};

// Rate of change of the radial function implied by a support-rate sample:
// (rho/h) * dh_dt per node.
std::vector<double> radial_rate(const SupportField& field, std::span<const double> dh_dt);

}  // namespace dualflow
