#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clcons/field.hpp"
#include "clcons/grid.hpp"

namespace clcons {

/// Discrete mollifier: non-negative, exactly symmetric taps of unit discrete
/// mass, all offsets within physical length epsilon. Derivative taps (one set
/// per axis) are exactly antisymmetric and sum to zero, so constants are
/// annihilated to machine precision.
///
/// Profiles:
///   "bump"        radial exp(-1/(1-|x/eps|^2)) sampled at lattice offsets
///   "tensor_bump" per-axis product of 1D bumps with axis radius
///                 eps/sqrt(dim), which keeps the support inside the
///                 Euclidean eps-ball and factorizes into per-axis passes
struct Kernel {
  Kernel(double eps, Grid g, std::string profile)
      : epsilon(eps), grid(std::move(g)), profile_name(std::move(profile)) {}

  double epsilon = 0.0;
  Grid grid;
  std::string profile_name;

  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> offsets;  // taps x dim
  Eigen::ArrayXd weights;                                      // joint taps
  std::vector<Eigen::ArrayXd> derivative_weights;              // per axis

  bool separable = false;
  std::vector<int> axis_radius;
  std::vector<Eigen::ArrayXd> axis_weights;   // per axis, 2m+1 entries
  std::vector<Eigen::ArrayXd> axis_dweights;  // derivative factor per axis

  int tap_count() const { return static_cast<int>(weights.size()); }
};

Kernel make_kernel(const Grid& grid, double epsilon, const std::string& profile = "tensor_bump");

/// Discrete convolution u * eta^eps evaluated on `region`; the output field
/// is valid exactly there. Direct summation over the joint taps is the
/// normative semantics; separable kernels take a factorized fast path that
/// matches it to roundoff.
Field mollify(const Field& field, const Kernel& kernel, const IndexBox& region);
Field mollify(const Field& field, const Kernel& kernel, const InteriorRegion& region);

/// Convolution with the closed-form axis derivative of the kernel profile;
/// equals d/dx_axis of mollify for smooth fields to O(spacing^2).
Field mollified_derivative(const Field& field, const Kernel& kernel, int axis,
                           const IndexBox& region);
Field mollified_derivative(const Field& field, const Kernel& kernel, int axis,
                           const InteriorRegion& region);

/// Reference direct-sum paths (no separable shortcut), for equivalence tests.
Field mollify_direct(const Field& field, const Kernel& kernel, const IndexBox& region);
Field mollified_derivative_direct(const Field& field, const Kernel& kernel, int axis,
                                  const IndexBox& region);

/// Sweep epsilons are snapped to integer multiples of the coarsest spacing
/// and recorded as-snapped.
double snap_epsilon(const Grid& grid, double epsilon);

}  // namespace clcons
