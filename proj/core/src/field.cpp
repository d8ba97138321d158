#include <dualflow/field.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dualflow {

namespace {

std::string loss_message(std::size_t node, double radius) {
  return "curvature radius " + std::to_string(radius) + " <= 0 at node " + std::to_string(node);
}

}  // namespace

ConvexityLoss::ConvexityLoss(std::size_t node_in, double radius_in)
    : std::runtime_error(loss_message(node_in, radius_in)), node(node_in), radius(radius_in) {}

NotConvex::NotConvex(std::size_t node_in)
    : std::runtime_error("shape is not convex at node " + std::to_string(node_in)), node(node_in) {}

SupportField::SupportField(std::shared_ptr<const SphericalGrid> grid, std::vector<double> h)
    : grid_(std::move(grid)), h_(std::move(h)) {
  if (!grid_) throw std::invalid_argument("SupportField: null grid");
  const std::size_t n = grid_->size();
  if (h_.size() != n) throw std::invalid_argument("SupportField: sample count does not match grid");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h_[i] > 0.0) || !std::isfinite(h_[i])) {
      throw std::invalid_argument("SupportField: h must be positive and finite (node " + std::to_string(i) + ")");
    }
  }
  dh_.resize(n);
  d2h_.resize(n);
  grid_->derivative1(h_, dh_);
  grid_->derivative2(h_, d2h_);
  lambda1_.resize(n);
  det_.resize(n);
  rho_.resize(n);
  for (std::size_t i = 0; i < n; ++i) lambda1_[i] = d2h_[i] + h_[i];
  if (grid_->dim() == 3) {
    lambda2_.resize(n);
    const auto& c = grid_->cos_theta();
    const auto& s = grid_->sin_theta();
    for (std::size_t i = 0; i < n; ++i) {
      lambda2_[i] = dh_[i] * c[i] / s[i] + h_[i];  // nodes are pole-free, s > 0
      det_[i] = lambda1_[i] * lambda2_[i];
    }
  } else {
    det_ = lambda1_;
  }
  for (std::size_t i = 0; i < n; ++i) rho_[i] = std::sqrt(h_[i] * h_[i] + dh_[i] * dh_[i]);
}

std::span<const double> SupportField::lambda2() const {
  if (grid_->dim() != 3) throw std::logic_error("lambda2 exists only for the axisymmetric grid");
  return lambda2_;
}

std::span<const double> SupportField::det_b() const {
  for (std::size_t i = 0; i < lambda1_.size(); ++i) {
    if (!(lambda1_[i] > 0.0)) throw ConvexityLoss(i, lambda1_[i]);
    if (!lambda2_.empty() && !(lambda2_[i] > 0.0)) throw ConvexityLoss(i, lambda2_[i]);
  }
  return det_;
}

double SupportField::gauss_curvature(std::size_t i) const {
  if (!(lambda1_[i] > 0.0)) throw ConvexityLoss(i, lambda1_[i]);
  if (!lambda2_.empty() && !(lambda2_[i] > 0.0)) throw ConvexityLoss(i, lambda2_[i]);
  return 1.0 / det_[i];
}

bool SupportField::convex() const noexcept {
  for (std::size_t i = 0; i < lambda1_.size(); ++i) {
    if (!(lambda1_[i] > 0.0)) return false;
    if (!lambda2_.empty() && !(lambda2_[i] > 0.0)) return false;
  }
  return true;
}

double SupportField::radius_min() const {
  double m = lambda1_[0];
  for (double v : lambda1_) m = std::min(m, v);
  for (double v : lambda2_) m = std::min(m, v);
  return m;
}

double SupportField::radius_max() const {
  double m = lambda1_[0];
  for (double v : lambda1_) m = std::max(m, v);
  for (double v : lambda2_) m = std::max(m, v);
  return m;
}

double SupportField::h_min() const noexcept { return *std::min_element(h_.begin(), h_.end()); }
double SupportField::h_max() const noexcept { return *std::max_element(h_.begin(), h_.end()); }

double SupportField::grad_sup() const noexcept {
  double m = 0.0;
  for (double v : dh_) m = std::max(m, std::fabs(v));
  return m;
}

void SupportField::boundary_point(std::size_t i, std::span<double> out) const {
  const double c = grid_->cos_theta()[i], s = grid_->sin_theta()[i];
  const double a = h_[i] * c - dh_[i] * s;
  const double b = h_[i] * s + dh_[i] * c;
  if (grid_->dim() == 2) {
    out[0] = a;
    out[1] = b;
  } else {
    // Azimuth 0 meridian representative: (off-axis, 0, axial).
    out[0] = b;
    out[1] = 0.0;
    out[2] = a;
  }
}

bool SupportField::is_even(double tol) const noexcept {
  for (std::size_t i = 0; i < h_.size(); ++i) {
    const std::size_t j = grid_->antipode(i);
    if (std::fabs(h_[i] - h_[j]) > tol * std::max(1.0, std::fabs(h_[i]))) return false;
  }
  return true;
}

SupportField SupportField::symmetrized() const {
  std::vector<double> out(h_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t j = grid_->antipode(i);
    if (i < j) {
      const double m = 0.5 * (out[i] + out[j]);
      out[i] = m;
      out[j] = m;
    }
  }
  return SupportField(grid_, std::move(out));
}

std::vector<double> radial_rate(const SupportField& field, std::span<const double> dh_dt) {
  if (dh_dt.size() != field.size()) throw std::invalid_argument("radial_rate: size mismatch");
  std::vector<double> out(dh_dt.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field.rho()[i] / field.h()[i] * dh_dt[i];
  return out;
}

}  // namespace dualflow
