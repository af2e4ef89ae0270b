#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "clcons/grid.hpp"

namespace clcons {

/// Sampled map u: grid -> R^n. Values sit in an n x N matrix whose columns
/// are per-point state vectors, column index = row-major flat grid index, so
/// the raw buffer is point-major with the component index fastest.
///
/// A field may carry a validity mask (all points valid when absent): shifts
/// off a bounded axis and restrictions to a region mark points invalid, and
/// invalid points simply contribute nothing to norms and quadratures.
class Field {
 public:
  Field(Grid grid, int component_count);

  const Grid& grid() const { return grid_; }
  int component_count() const { return components_; }

  Eigen::MatrixXd& values() { return values_; }
  const Eigen::MatrixXd& values() const { return values_; }

  double& value(int component, std::int64_t flat) { return values_(component, flat); }
  double value(int component, std::int64_t flat) const { return values_(component, flat); }
  auto state(std::int64_t flat) const { return values_.col(flat); }

  bool all_valid() const { return valid_.empty(); }
  bool valid(std::int64_t flat) const { return valid_.empty() || valid_[flat] != 0; }
  void mark_all_valid() { valid_.clear(); }
  void mark_valid_only(const IndexBox& box);
  void mark_invalid(std::int64_t flat);
  std::int64_t valid_count() const;

  void require_finite(const char* context) const;

 private:
  Grid grid_;
  int components_;
  Eigen::MatrixXd values_;
  std::vector<std::uint8_t> valid_;
};

/// Samples evaluator(x) at every lattice point. Throws if it ever returns a
/// non-finite value.
Field sample_function(const Grid& grid, int component_count,
                      const std::function<void(const Eigen::VectorXd&, Eigen::Ref<Eigen::VectorXd>)>& evaluator);
Field sample_scalar(const Grid& grid, const std::function<double(const Eigen::VectorXd&)>& evaluator);

/// values[x] = original values[x - offset]; wraps on periodic axes and marks
/// out-of-range samples invalid on bounded axes.
Field shift_field(const Field& field, std::span<const int> lattice_offset);

/// Pointwise a - b; a sample is valid only where both operands are.
Field field_difference(const Field& a, const Field& b);

/// Discrete L^p norm over the region: (sum |u(x)|^p * cellvolume)^(1/p) with
/// |u(x)| the Euclidean norm across components, or |u_c(x)| when a single
/// component c >= 0 is requested. Invalid samples are skipped without volume
/// renormalization.
double field_norm_p(const Field& field, double p, const IndexBox& region, int component = -1);
double field_norm_p(const Field& field, double p, const InteriorRegion& region, int component = -1);

double field_max_abs(const Field& field, const IndexBox& region, int component = -1);

}  // namespace clcons
