#include "clcons/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace clcons {

std::int64_t IndexBox::count() const {
  std::int64_t c = 1;
  for (int k = 0; k < dim(); ++k) {
    if (hi[k] <= lo[k]) return 0;
    c *= static_cast<std::int64_t>(hi[k] - lo[k]);
  }
  return c;
}

bool IndexBox::empty() const { return count() == 0; }

bool IndexBox::contains(std::span<const int> idx) const {
  for (int k = 0; k < dim(); ++k) {
    if (idx[k] < lo[k] || idx[k] >= hi[k]) return false;
  }
  return true;
}

IndexBox IndexBox::expanded(std::span<const int> pad) const {
  IndexBox out = *this;
  for (int k = 0; k < dim(); ++k) {
    out.lo[k] -= pad[k];
    out.hi[k] += pad[k];
  }
  return out;
}

IndexBox IndexBox::expanded_axis(int axis, int pad) const {
  IndexBox out = *this;
  out.lo[axis] -= pad;
  out.hi[axis] += pad;
  return out;
}

std::string IndexBox::describe() const {
  std::ostringstream os;
  os << "[";
  for (int k = 0; k < dim(); ++k) {
    if (k) os << ",";
    os << "[" << lo[k] << "," << hi[k] << ")";
  }
  os << "]";
  return os.str();
}

Grid::Grid(std::vector<int> points_per_axis, std::vector<double> extent_per_axis,
           std::vector<bool> periodic_per_axis)
    : points_(std::move(points_per_axis)),
      extent_(std::move(extent_per_axis)),
      periodic_(std::move(periodic_per_axis)) {
  const std::size_t dim = points_.size();
  if (dim == 0 || extent_.size() != dim || periodic_.size() != dim) {
    throw std::invalid_argument("grid: per-axis lists must have equal length >= 1");
  }
  spacing_.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (points_[k] < 4) {
      throw std::invalid_argument("grid: need at least 4 points per axis");
    }
    if (!(extent_[k] > 0.0) || !std::isfinite(extent_[k])) {
      throw std::invalid_argument("grid: axis extent must be positive and finite");
    }
    spacing_[k] = periodic_[k] ? extent_[k] / points_[k] : extent_[k] / (points_[k] - 1);
  }
  strides_.assign(dim, 1);
  for (int k = static_cast<int>(dim) - 2; k >= 0; --k) {
    strides_[k] = strides_[k + 1] * points_[k + 1];
  }
  point_count_ = strides_[0] * points_[0];
  cell_volume_ = 1.0;
  for (double h : spacing_) cell_volume_ *= h;
  if (!(cell_volume_ > 0.0)) {
    throw std::invalid_argument("grid: cell volume must be strictly positive");
  }
}

double Grid::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.end());
}

double Grid::min_extent() const {
  return *std::min_element(extent_.begin(), extent_.end());
}

void Grid::point(std::span<const int> idx, Eigen::Ref<Eigen::VectorXd> out) const {
  for (int k = 0; k < dim_count(); ++k) out[k] = coordinate(k, idx[k]);
}

std::int64_t Grid::flat_index(std::span<const int> idx) const {
  std::int64_t flat = 0;
  for (int k = 0; k < dim_count(); ++k) {
    flat += strides_[k] * static_cast<std::int64_t>(wrap(k, idx[k]));
  }
  return flat;
}

void Grid::unflatten(std::int64_t flat, std::span<int> idx) const {
  for (int k = 0; k < dim_count(); ++k) {
    idx[k] = static_cast<int>(flat / strides_[k]);
    flat %= strides_[k];
  }
}

int Grid::wrap(int axis, int index) const {
  if (!periodic_[axis]) return index;
  const int n = points_[axis];
  int r = index % n;
  return r < 0 ? r + n : r;
}

IndexBox Grid::full_box() const {
  IndexBox box;
  box.lo.assign(dim_count(), 0);
  box.hi = points_;
  return box;
}

bool Grid::operator==(const Grid& other) const {
  return points_ == other.points_ && extent_ == other.extent_ &&
         periodic_ == other.periodic_;
}

Grid make_grid(std::vector<int> points_per_axis, std::vector<double> extent_per_axis,
               std::vector<bool> periodic_per_axis) {
  return Grid(std::move(points_per_axis), std::move(extent_per_axis),
              std::move(periodic_per_axis));
}

InteriorRegion::InteriorRegion(const Grid& grid, std::vector<double> margin_per_axis)
    : grid_(grid), margin_(std::move(margin_per_axis)) {
  if (static_cast<int>(margin_.size()) != grid_.dim_count()) {
    throw std::invalid_argument("interior region: one margin per axis required");
  }
  box_.lo.resize(grid_.dim_count());
  box_.hi.resize(grid_.dim_count());
  for (int k = 0; k < grid_.dim_count(); ++k) {
    if (margin_[k] < 0.0) {
      throw std::invalid_argument("interior region: margins must be non-negative");
    }
    if (grid_.periodic(k)) {
      if (margin_[k] != 0.0) {
        throw std::invalid_argument("interior region: periodic axes take margin 0");
      }
      box_.lo[k] = 0;
      box_.hi[k] = grid_.points(k);
    } else {
      const double h = grid_.spacing(k);
      const int lo = static_cast<int>(std::ceil(margin_[k] / h - 1e-12));
      box_.lo[k] = lo;
      box_.hi[k] = grid_.points(k) - lo;
    }
  }
  if (box_.empty()) {
    throw std::invalid_argument("interior region: margins leave no interior points");
  }
}

std::string InteriorRegion::describe() const {
  std::ostringstream os;
  os << "margins=[";
  for (std::size_t k = 0; k < margin_.size(); ++k) {
    if (k) os << ",";
    os << margin_[k];
  }
  os << "] box=" << box_.describe();
  return os.str();
}

}  // namespace clcons
