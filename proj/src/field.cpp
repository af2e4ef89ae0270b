#include "clcons/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace clcons {

Field::Field(Grid grid, int component_count)
    : grid_(std::move(grid)), components_(component_count) {
  if (components_ < 1) throw std::invalid_argument("field: component_count must be >= 1");
  values_.setZero(components_, grid_.point_count());
}

void Field::mark_valid_only(const IndexBox& box) {
  valid_.assign(static_cast<std::size_t>(grid_.point_count()), 0);
  for_each_index(box, [&](std::span<const int> idx) {
    valid_[static_cast<std::size_t>(grid_.flat_index(idx))] = 1;
  });
}

void Field::mark_invalid(std::int64_t flat) {
  if (valid_.empty()) valid_.assign(static_cast<std::size_t>(grid_.point_count()), 1);
  valid_[static_cast<std::size_t>(flat)] = 0;
}

std::int64_t Field::valid_count() const {
  if (valid_.empty()) return grid_.point_count();
  std::int64_t c = 0;
  for (auto v : valid_) c += v;
  return c;
}

void Field::require_finite(const char* context) const {
  if (!values_.allFinite()) {
    throw std::invalid_argument(std::string(context) + ": field contains non-finite values");
  }
}

Field sample_function(const Grid& grid, int component_count,
                      const std::function<void(const Eigen::VectorXd&, Eigen::Ref<Eigen::VectorXd>)>& evaluator) {
  Field field(grid, component_count);
  Eigen::VectorXd x(grid.dim_count());
  Eigen::VectorXd u(component_count);
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    grid.point(idx, x);
    evaluator(x, u);
    if (!u.allFinite()) {
      throw std::invalid_argument("sample_function: evaluator returned a non-finite value");
    }
    field.values().col(flat++) = u;
  });
  return field;
}

Field sample_scalar(const Grid& grid, const std::function<double(const Eigen::VectorXd&)>& evaluator) {
  return sample_function(grid, 1, [&](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) {
    out[0] = evaluator(x);
  });
}

Field shift_field(const Field& field, std::span<const int> lattice_offset) {
  const Grid& grid = field.grid();
  if (static_cast<int>(lattice_offset.size()) != grid.dim_count()) {
    throw std::invalid_argument("shift_field: offset dimension mismatch");
  }
  Field out(grid, field.component_count());
  std::vector<int> src(grid.dim_count());
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    bool in_range = true;
    for (int k = 0; k < grid.dim_count(); ++k) {
      src[k] = idx[k] - lattice_offset[k];
      if (!grid.periodic(k) && (src[k] < 0 || src[k] >= grid.points(k))) in_range = false;
    }
    if (in_range && field.valid(field.grid().flat_index(src))) {
      out.values().col(flat) = field.values().col(grid.flat_index(src));
    } else {
      out.mark_invalid(flat);
    }
    ++flat;
  });
  return out;
}

Field field_difference(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()) || a.component_count() != b.component_count()) {
    throw std::invalid_argument("field_difference: incompatible fields");
  }
  Field out(a.grid(), a.component_count());
  out.values() = a.values() - b.values();
  if (!a.all_valid() || !b.all_valid()) {
    for (std::int64_t i = 0; i < a.grid().point_count(); ++i) {
      if (!a.valid(i) || !b.valid(i)) out.mark_invalid(i);
    }
  }
  return out;
}

namespace {

double point_magnitude(const Field& field, std::int64_t flat, int component) {
  if (component >= 0) return std::abs(field.value(component, flat));
  return field.state(flat).norm();
}

}  // namespace

double field_norm_p(const Field& field, double p, const IndexBox& region, int component) {
  if (!(p >= 1.0)) throw std::invalid_argument("field_norm_p: p must be >= 1");
  if (region.empty()) throw std::invalid_argument("field_norm_p: empty region");
  if (component >= field.component_count()) {
    throw std::invalid_argument("field_norm_p: component out of range");
  }
  const Grid& grid = field.grid();
  double acc = 0.0;
  for_each_index(region, [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    if (!field.valid(flat)) return;
    const double m = point_magnitude(field, flat, component);
    acc += (p == 2.0) ? m * m : std::pow(m, p);
  });
  return std::pow(acc * grid.cell_volume(), 1.0 / p);
}

double field_norm_p(const Field& field, double p, const InteriorRegion& region, int component) {
  return field_norm_p(field, p, region.box(), component);
}

double field_max_abs(const Field& field, const IndexBox& region, int component) {
  const Grid& grid = field.grid();
  double best = 0.0;
  for_each_index(region, [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    if (!field.valid(flat)) return;
    best = std::max(best, point_magnitude(field, flat, component));
  });
  return best;
}

}  // namespace clcons
