#pragma once

#include <span>

#include <Eigen/Dense>

#include "clcons/grid.hpp"

namespace clcons {

/// Smooth compactly supported bump phi(x) = prod_k b((x_k - c_k)/r_k) with
/// b(t) = exp(-1/(1-t^2)) for |t| < 1 and 0 outside. Values and derivatives
/// come from the closed form, never from finite differences, and are exactly
/// zero at every lattice point outside the support box.
class TestFunction {
 public:
  TestFunction(Grid grid, Eigen::VectorXd center, Eigen::VectorXd radius_per_axis);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::VectorXd& radius() const { return radius_; }

  double value(std::span<const int> idx) const;
  double derivative(int axis, std::span<const int> idx) const;
  double value_at_point(const Eigen::VectorXd& x) const;
  double derivative_at_point(int axis, const Eigen::VectorXd& x) const;

  /// Lattice indices whose coordinates can lie inside the open support. On
  /// periodic axes the range is unwrapped and may run outside [0, points).
  const IndexBox& support_box() const { return support_; }
  bool supported_in(const IndexBox& region) const;

  double max_abs_value() const;
  double max_abs_derivative(int axis) const;

 private:
  double displacement(int axis, double x) const;

  Grid grid_;
  Eigen::VectorXd center_;
  Eigen::VectorXd radius_;
  IndexBox support_;
};

}  // namespace clcons
