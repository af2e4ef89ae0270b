#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace clcons {

/// Half-open per-axis index ranges [lo, hi). On periodic axes lo may be
/// negative or hi may exceed the axis point count; reads through such a
/// box wrap modulo the axis.
struct IndexBox {
  std::vector<int> lo;
  std::vector<int> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  std::int64_t count() const;
  bool empty() const;
  bool contains(std::span<const int> idx) const;
  IndexBox expanded(std::span<const int> pad) const;
  IndexBox expanded_axis(int axis, int pad) const;
  std::string describe() const;
};

/// Uniform rectangular sampling lattice over a box in R^{d+1}. Each axis is
/// either periodic (torus; samples at i*h, h = extent/points) or bounded
/// (closed interval; samples at i*h, h = extent/(points-1)).
class Grid {
 public:
  Grid(std::vector<int> points_per_axis, std::vector<double> extent_per_axis,
       std::vector<bool> periodic_per_axis);

  int dim_count() const { return static_cast<int>(points_.size()); }
  int points(int axis) const { return points_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  bool periodic(int axis) const { return periodic_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  const std::vector<int>& points_per_axis() const { return points_; }
  const std::vector<double>& extent_per_axis() const { return extent_; }
  const std::vector<bool>& periodic_per_axis() const { return periodic_; }

  std::int64_t point_count() const { return point_count_; }
  double cell_volume() const { return cell_volume_; }
  double max_spacing() const;
  double min_extent() const;

  double coordinate(int axis, int index) const { return index * spacing_[axis]; }
  void point(std::span<const int> idx, Eigen::Ref<Eigen::VectorXd> out) const;

  /// Row-major flattening, last axis fastest. Indices wrap on periodic axes;
  /// out-of-range indices on bounded axes are the caller's bug.
  std::int64_t flat_index(std::span<const int> idx) const;
  void unflatten(std::int64_t flat, std::span<int> idx) const;
  const std::vector<std::int64_t>& strides() const { return strides_; }

  int wrap(int axis, int index) const;
  IndexBox full_box() const;

  bool operator==(const Grid& other) const;

 private:
  std::vector<int> points_;
  std::vector<double> extent_;
  std::vector<bool> periodic_;
  std::vector<double> spacing_;
  std::vector<std::int64_t> strides_;
  std::int64_t point_count_ = 0;
  double cell_volume_ = 0.0;
};

Grid make_grid(std::vector<int> points_per_axis, std::vector<double> extent_per_axis,
               std::vector<bool> periodic_per_axis);

/// Analysis window strictly inside the grid, the discrete stand-in for a
/// compactly contained subdomain. Margins are physical lengths measured from
/// the bounded endpoints; periodic axes take margin 0.
class InteriorRegion {
 public:
  InteriorRegion(const Grid& grid, std::vector<double> margin_per_axis);

  const Grid& grid() const { return grid_; }
  const IndexBox& box() const { return box_; }
  double margin(int axis) const { return margin_[axis]; }
  const std::vector<double>& margins() const { return margin_; }
  std::string describe() const;

 private:
  Grid grid_;
  std::vector<double> margin_;
  IndexBox box_;
};

/// Visits every multi-index of `box` in row-major order (last axis fastest).
/// fn(idx) receives a scratch index vector valid only during the call.
template <typename F>
void for_each_index(const IndexBox& box, F&& fn) {
  const int dim = box.dim();
  if (box.empty()) return;
  std::vector<int> idx(box.lo);
  while (true) {
    fn(std::span<const int>(idx));
    int axis = dim - 1;
    while (axis >= 0) {
      if (++idx[axis] < box.hi[axis]) break;
      idx[axis] = box.lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

}  // namespace clcons
