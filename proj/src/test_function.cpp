#include "clcons/test_function.hpp"

#include <cmath>
#include <stdexcept>

namespace clcons {

namespace {

double bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t2));
}

double bump_derivative(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  const double denom = 1.0 - t2;
  return bump(t) * (-2.0 * t / (denom * denom));
}

}  // namespace

TestFunction::TestFunction(Grid grid, Eigen::VectorXd center, Eigen::VectorXd radius_per_axis)
    : grid_(std::move(grid)), center_(std::move(center)), radius_(std::move(radius_per_axis)) {
  const int dim = grid_.dim_count();
  if (center_.size() != dim || radius_.size() != dim) {
    throw std::invalid_argument("test function: center/radius dimension mismatch");
  }
  support_.lo.resize(dim);
  support_.hi.resize(dim);
  for (int k = 0; k < dim; ++k) {
    if (!(radius_[k] > 0.0)) {
      throw std::invalid_argument("test function: radii must be positive");
    }
    if (grid_.periodic(k) && !(radius_[k] < 0.5 * grid_.extent(k))) {
      throw std::invalid_argument("test function: radius must be below half the periodic extent");
    }
    const double h = grid_.spacing(k);
    support_.lo[k] = static_cast<int>(std::ceil((center_[k] - radius_[k]) / h));
    support_.hi[k] = static_cast<int>(std::floor((center_[k] + radius_[k]) / h)) + 1;
    if (!grid_.periodic(k)) {
      if (support_.lo[k] < 0 || support_.hi[k] > grid_.points(k)) {
        throw std::invalid_argument("test function: support leaves the bounded domain");
      }
    }
  }
}

double TestFunction::displacement(int axis, double x) const {
  double dx = x - center_[axis];
  if (grid_.periodic(axis)) {
    const double L = grid_.extent(axis);
    dx -= L * std::round(dx / L);
  }
  return dx;
}

double TestFunction::value_at_point(const Eigen::VectorXd& x) const {
  double v = 1.0;
  for (int k = 0; k < grid_.dim_count(); ++k) {
    v *= bump(displacement(k, x[k]) / radius_[k]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double TestFunction::derivative_at_point(int axis, const Eigen::VectorXd& x) const {
  double v = 1.0;
  for (int k = 0; k < grid_.dim_count(); ++k) {
    const double t = displacement(k, x[k]) / radius_[k];
    v *= (k == axis) ? bump_derivative(t) / radius_[k] : bump(t);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double TestFunction::value(std::span<const int> idx) const {
  double v = 1.0;
  for (int k = 0; k < grid_.dim_count(); ++k) {
    v *= bump(displacement(k, grid_.coordinate(k, idx[k])) / radius_[k]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double TestFunction::derivative(int axis, std::span<const int> idx) const {
  double v = 1.0;
  for (int k = 0; k < grid_.dim_count(); ++k) {
    const double t = displacement(k, grid_.coordinate(k, idx[k])) / radius_[k];
    v *= (k == axis) ? bump_derivative(t) / radius_[k] : bump(t);
    if (v == 0.0) return 0.0;
  }
  return v;
}

bool TestFunction::supported_in(const IndexBox& region) const {
  for (int k = 0; k < grid_.dim_count(); ++k) {
    if (grid_.periodic(k)) continue;
    if (support_.lo[k] < region.lo[k] || support_.hi[k] > region.hi[k]) return false;
  }
  return true;
}

double TestFunction::max_abs_value() const {
  return std::pow(bump(0.0), grid_.dim_count());
}

double TestFunction::max_abs_derivative(int axis) const {
  // scan |b'| once at high resolution; the other axes peak at b(0)
  double best = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    best = std::max(best, std::abs(bump_derivative(-1.0 + 1e-3 * i)));
  }
  return best / radius_[axis] * std::pow(bump(0.0), grid_.dim_count() - 1);
}

}  // namespace clcons
