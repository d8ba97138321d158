#include <dualflow/grid.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SphericalGrid::SphericalGrid(int dim, std::size_t nodes) : dim_(dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("SphericalGrid: dim must be 2 or 3");
  if (nodes < 16) throw std::invalid_argument("SphericalGrid: need at least 16 nodes");
  if (nodes % 2 != 0) throw std::invalid_argument("SphericalGrid: node count must be even");

  theta_.resize(nodes);
  weights_.resize(nodes);
  cos_.resize(nodes);
  sin_.resize(nodes);

  if (dim == 2) {
    spacing_ = kTwoPi / static_cast<double>(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      theta_[i] = spacing_ * static_cast<double>(i);
      weights_[i] = spacing_;
    }
  } else {
    spacing_ = std::numbers::pi / static_cast<double>(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      theta_[i] = spacing_ * (static_cast<double>(i) + 0.5);
      weights_[i] = kTwoPi * std::sin(theta_[i]) * spacing_;
    }
  }
  // Fill the second half by mirroring so antipodal node pairs see exactly
  // opposite directions; std::cos(theta) alone misses that by an ulp.
  for (std::size_t i = 0; i < nodes / 2; ++i) {
    cos_[i] = std::cos(theta_[i]);
    sin_[i] = std::sin(theta_[i]);
    const std::size_t j = antipode(i);
    cos_[j] = -cos_[i];
    sin_[j] = dim == 2 ? -sin_[i] : sin_[i];
  }
  if (dim == 3) {
    for (std::size_t i = 0; i < nodes / 2; ++i) weights_[antipode(i)] = weights_[i];
  }
}

std::size_t SphericalGrid::antipode(std::size_t i) const noexcept {
  const std::size_t n = theta_.size();
  return dim_ == 2 ? (i + n / 2) % n : n - 1 - i;
}

double SphericalGrid::integrate(std::span<const double> values) const {
  const std::size_t n = theta_.size();
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<long double>(weights_[i]) * values[i];
  if (dim_ == 3) {
    // Midpoint-rule error against 2*pi*Int F sin = -(dx^2/24)(g'(pi)-g'(0))
    // with g = F sin, so g'(0) = F(0), g'(pi) = -F(pi). Pole values come from
    // the even quadratic through the two nearest cells: F(0) ~ (9F0 - F1)/8.
    const double f_north = (9.0 * values[0] - values[1]) / 8.0;
    const double f_south = (9.0 * values[n - 1] - values[n - 2]) / 8.0;
    acc -= static_cast<long double>(kTwoPi * spacing_ * spacing_ / 24.0) * (f_north + f_south);
  }
  return static_cast<double>(acc);
}

namespace {

// Index maps for the ghost region: periodic wrap on S^1, even reflection
// across theta = 0 and theta = pi on the cell-centered polar grid
// (node -1 mirrors node 0, node N mirrors node N-1).
inline std::size_t wrap(std::ptrdiff_t i, std::ptrdiff_t n) {
  return static_cast<std::size_t>((i % n + n) % n);
}
inline std::size_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (i < 0) i = -1 - i;
  if (i >= n) i = 2 * n - 1 - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

void SphericalGrid::derivative1(std::span<const double> f, std::span<double> out) const {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(theta_.size());
  const double inv = 1.0 / (12.0 * spacing_);
  if (dim_ == 2) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          (-f[wrap(i + 2, n)] + 8.0 * f[wrap(i + 1, n)] - 8.0 * f[wrap(i - 1, n)] + f[wrap(i - 2, n)]) * inv;
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          (-f[reflect(i + 2, n)] + 8.0 * f[reflect(i + 1, n)] - 8.0 * f[reflect(i - 1, n)] + f[reflect(i - 2, n)]) *
          inv;
    }
  }
}

void SphericalGrid::derivative2(std::span<const double> f, std::span<double> out) const {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(theta_.size());
  const double inv = 1.0 / (12.0 * spacing_ * spacing_);
  if (dim_ == 2) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = (-f[wrap(i + 2, n)] + 16.0 * f[wrap(i + 1, n)] -
                                          30.0 * f[wrap(i, n)] + 16.0 * f[wrap(i - 1, n)] - f[wrap(i - 2, n)]) *
                                         inv;
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          (-f[reflect(i + 2, n)] + 16.0 * f[reflect(i + 1, n)] - 30.0 * f[reflect(i, n)] +
           16.0 * f[reflect(i - 1, n)] - f[reflect(i - 2, n)]) *
          inv;
    }
  }
}

}  // namespace dualflow
