#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dualflow {

// Angular quadrature grid for origin-symmetric convex bodies: the full circle
// S^1 when dim == 2, or the polar angle of an axisymmetric S^2 when dim == 3.
//
// dim == 2: theta_i = 2*pi*i/N, periodic, uniform weights 2*pi/N.
// dim == 3: theta_j = (j + 1/2)*pi/N, cell-centered so the poles are never
//           sampled, weights 2*pi*sin(theta_j)*(pi/N).
class SphericalGrid {
public:
  // nodes must be even (the antipodal map must be an involution without
  // fixed points) and at least 16 (widest stencil plus headroom).
  SphericalGrid(int dim, std::size_t nodes);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return theta_.size(); }
  double spacing() const noexcept { return spacing_; }

  const std::vector<double>& theta() const noexcept { return theta_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& cos_theta() const noexcept { return cos_; }
  const std::vector<double>& sin_theta() const noexcept { return sin_; }

  // Node index of the direction -x_i. dim == 2: i + N/2 mod N;
  // dim == 3: N - 1 - i (polar reflection).
  std::size_t antipode(std::size_t i) const noexcept;

  // Integral over the sphere of a node-sampled function. dim == 2 is the
  // periodic trapezoid rule (spectrally accurate for smooth integrands).
  // dim == 3 is the midpoint rule in theta plus an Euler-Maclaurin pole
  // correction built from even extrapolation of the integrand; the plain
  // midpoint rule stalls at a relative error of spacing^2/24, which is too
  // coarse for the volume identities this grid has to support.
  double integrate(std::span<const double> values) const;

  // 4th-order centered derivatives in theta. dim == 2 wraps periodically;
  // dim == 3 reflects across both poles (support functions of axisymmetric
  // bodies extend evenly, so reflection preserves the stencil order).
  void derivative1(std::span<const double> f, std::span<double> out) const;
  void derivative2(std::span<const double> f, std::span<double> out) const;

private:
  int dim_;
  double spacing_;
  std::vector<double> theta_, weights_, cos_, sin_;
};

}  // namespace dualflow
