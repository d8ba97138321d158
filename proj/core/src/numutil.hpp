#pragma once

// Internal numeric helpers shared by the library sources. Not installed.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace dualflow::detail {

// std::pow with fast paths for the small integer exponents that dominate the
// flow's hot loops (power-law weights and densities).
inline double pow_real(double s, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return s;
  if (e == -1.0) return 1.0 / s;
  if (e == 2.0) return s * s;
  if (e == -2.0) return 1.0 / (s * s);
  const double r = std::nearbyint(e);
  if (r == e && std::fabs(e) <= 8.0) {
    double base = s, acc = 1.0;
    int k = static_cast<int>(std::fabs(e));
    while (k > 0) {
      if (k & 1) acc *= base;
      base *= base;
      k >>= 1;
    }
    return e > 0 ? acc : 1.0 / acc;
  }
  return std::pow(s, e);
}

// Adaptive Simpson on a finite interval. rel_tol is relative to the running
// estimate; throws when the recursion budget runs out before the tolerance
// is met (the integrand is then presumed incompatible with its declared
// integrability).
class AdaptiveSimpson {
public:
  AdaptiveSimpson(std::function<double(double)> f, double rel_tol, int max_depth = 48)
      : f_(std::move(f)), rel_tol_(rel_tol), max_depth_(max_depth) {}

  double integrate(double a, double b) const {
    const double fa = f_(a), fb = f_(b), fm = f_(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(std::fabs(whole), 1e-300);
    return recurse(a, b, fa, fm, fb, whole, scale, max_depth_);
  }

private:
  double recurse(double a, double b, double fa, double fm, double fb, double whole, double scale, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f_(lm), frm = f_(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * rel_tol_ * std::max(scale, std::fabs(left + right))) {
      return left + right + delta / 15.0;
    }
    if (depth <= 0) throw std::runtime_error("adaptive quadrature: tolerance not met");
    return recurse(a, m, fa, flm, fm, left, scale, depth - 1) + recurse(m, b, fm, frm, fb, right, scale, depth - 1);
  }

  std::function<double(double)> f_;
  double rel_tol_;
  int max_depth_;
};

// Geometric panel series for an improper endpoint. Integrates f over
// [a*2^-(k+1), a*2^-k] (direction = down, toward 0) or [a*2^k, a*2^(k+1)]
// (up, toward infinity) until the geometric tail estimate is negligible.
// Throws if the series has not settled after max_panels, which is how a
// divergent (case-violating) integrand announces itself.
inline double panel_series(const AdaptiveSimpson& quad, double a, bool down, double rel_tol, int max_panels = 2000) {
  long double acc = 0.0L;
  double prev = 0.0;
  for (int k = 0; k < max_panels; ++k) {
    const double scale = down ? std::ldexp(a, -k) : std::ldexp(a, k);
    const double lo = down ? 0.5 * scale : scale;
    const double hi = down ? scale : 2.0 * scale;
    const double panel = quad.integrate(lo, hi);
    acc += panel;
    if (k >= 1 && prev != 0.0) {
      const double ratio = std::fabs(panel) / std::fabs(prev);
      if (ratio < 0.999) {
        const double tail = std::fabs(panel) * ratio / (1.0 - ratio);
        if (tail <= rel_tol * std::fabs(static_cast<double>(acc))) return static_cast<double>(acc);
      }
    } else if (panel == 0.0 && k >= 1) {
      return static_cast<double>(acc);
    }
    prev = panel;
  }
  throw std::runtime_error("panel series did not converge");
}

}  // namespace dualflow::detail
