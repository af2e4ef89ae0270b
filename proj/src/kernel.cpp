#include "clcons/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "clcons/parallel.hpp"

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

void check_epsilon(const Grid& grid, double epsilon) {
  if (!(epsilon >= 2.0 * grid.max_spacing())) {
    throw std::invalid_argument("kernel: epsilon below twice the coarsest spacing");
  }
  if (!(epsilon < 0.5 * grid.min_extent())) {
    throw std::invalid_argument("kernel: epsilon must stay below half the shortest extent");
  }
}

Kernel make_radial_kernel(const Grid& grid, double epsilon) {
  const int dim = grid.dim_count();
  Kernel k(epsilon, grid, "bump");
  IndexBox box;
  box.lo.resize(dim);
  box.hi.resize(dim);
  for (int a = 0; a < dim; ++a) {
    const int m = static_cast<int>(std::floor(epsilon / grid.spacing(a) * (1.0 + 1e-12)));
    box.lo[a] = -m;
    box.hi[a] = m + 1;
  }
  std::vector<Eigen::VectorXi> offs;
  std::vector<double> w;
  std::vector<std::vector<double>> dw(dim);
  for_each_index(box, [&](std::span<const int> idx) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double x = idx[a] * grid.spacing(a);
      s += x * x;
    }
    s /= epsilon * epsilon;
    if (s >= 1.0) return;
    const double psi = std::exp(-1.0 / (1.0 - s));
    if (psi == 0.0) return;
    Eigen::VectorXi o(dim);
    for (int a = 0; a < dim; ++a) o[a] = idx[a];
    offs.push_back(o);
    w.push_back(psi);
    const double denom = (1.0 - s) * (1.0 - s);
    for (int a = 0; a < dim; ++a) {
      dw[a].push_back(-psi * 2.0 * (idx[a] * grid.spacing(a)) / (epsilon * epsilon * denom));
    }
  });
  const int taps = static_cast<int>(w.size());
  k.offsets.resize(taps, dim);
  k.weights.resize(taps);
  k.derivative_weights.assign(dim, Eigen::ArrayXd(taps));
  for (int t = 0; t < taps; ++t) {
    k.offsets.row(t) = offs[t].transpose();
    k.weights[t] = w[t];
    for (int a = 0; a < dim; ++a) k.derivative_weights[a][t] = dw[a][t];
  }
  const double z = k.weights.sum() * grid.cell_volume();
  k.weights /= z;
  for (int a = 0; a < dim; ++a) {
    k.derivative_weights[a] /= z;
    // zero mass via mean subtraction, then exact antisymmetrization (the tap
    // list is centrally symmetric, so reversal maps offset to its negation)
    k.derivative_weights[a] -= k.derivative_weights[a].mean();
    const Eigen::ArrayXd reversed = k.derivative_weights[a].reverse();
    k.derivative_weights[a] = 0.5 * (k.derivative_weights[a] - reversed);
  }
  return k;
}

Kernel make_tensor_kernel(const Grid& grid, double epsilon) {
  const int dim = grid.dim_count();
  Kernel k(epsilon, grid, "tensor_bump");
  k.separable = true;
  const double axis_r = epsilon / std::sqrt(static_cast<double>(dim));
  k.axis_radius.resize(dim);
  k.axis_weights.resize(dim);
  k.axis_dweights.resize(dim);
  for (int a = 0; a < dim; ++a) {
    const double h = grid.spacing(a);
    const int m = static_cast<int>(std::ceil(axis_r / h * (1.0 - 1e-12))) - 1;
    if (m < 1) {
      throw std::invalid_argument("kernel: epsilon too small for tensor profile on this grid");
    }
    k.axis_radius[a] = m;
    Eigen::ArrayXd b(2 * m + 1), db(2 * m + 1);
    for (int j = -m; j <= m; ++j) {
      b[j + m] = bump(j * h / axis_r);
      db[j + m] = bump_derivative(j * h / axis_r) / axis_r;
    }
    const double z = b.sum() * h;
    k.axis_weights[a] = b / z;
    k.axis_dweights[a] = db / z;
    k.axis_dweights[a] -= k.axis_dweights[a].mean();
    const Eigen::ArrayXd reversed = k.axis_dweights[a].reverse();
    k.axis_dweights[a] = 0.5 * (k.axis_dweights[a] - reversed);
  }
  // materialize the joint taps as exact products of the axis factors
  IndexBox box;
  box.lo.resize(dim);
  box.hi.resize(dim);
  std::int64_t taps = 1;
  for (int a = 0; a < dim; ++a) {
    box.lo[a] = -k.axis_radius[a];
    box.hi[a] = k.axis_radius[a] + 1;
    taps *= 2 * k.axis_radius[a] + 1;
  }
  k.offsets.resize(taps, dim);
  k.weights.resize(taps);
  k.derivative_weights.assign(dim, Eigen::ArrayXd(taps));
  std::int64_t t = 0;
  for_each_index(box, [&](std::span<const int> idx) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      k.offsets(t, a) = idx[a];
      w *= k.axis_weights[a][idx[a] + k.axis_radius[a]];
    }
    k.weights[t] = w;
    for (int a = 0; a < dim; ++a) {
      double d = 1.0;
      for (int b2 = 0; b2 < dim; ++b2) {
        const int j = idx[b2] + k.axis_radius[b2];
        d *= (b2 == a) ? k.axis_dweights[b2][j] : k.axis_weights[b2][j];
      }
      k.derivative_weights[a][t] = d;
    }
    ++t;
  });
  return k;
}

/// Row-major linearization of an index box.
struct BoxIndexer {
  IndexBox box;
  std::vector<std::int64_t> strides;

  void reset(const IndexBox& b) {
    box = b;
    const int dim = b.dim();
    strides.assign(dim, 1);
    for (int k = dim - 2; k >= 0; --k) {
      strides[k] = strides[k + 1] * (box.hi[k + 1] - box.lo[k + 1]);
    }
  }

  std::int64_t offset_of(std::span<const int> idx) const {
    std::int64_t off = 0;
    for (int k = 0; k < box.dim(); ++k) {
      off += strides[k] * static_cast<std::int64_t>(idx[k] - box.lo[k]);
    }
    return off;
  }

  void unflatten(std::int64_t off, std::span<int> idx) const {
    for (int k = 0; k < box.dim(); ++k) {
      idx[k] = box.lo[k] + static_cast<int>(off / strides[k]);
      off %= strides[k];
    }
  }
};

/// Dense scratch over an index box, component-major like Field.
struct BoxBuffer {
  BoxIndexer shape;
  Eigen::MatrixXd data;  // components x box.count()

  void reset(const IndexBox& b, int components) {
    shape.reset(b);
    data.setZero(components, b.count());
  }
};

void check_region(const Field& field, const Kernel& kernel, const IndexBox& region,
                  std::span<const int> reach) {
  const Grid& grid = field.grid();
  if (!(grid == kernel.grid)) {
    throw std::invalid_argument("mollify: kernel was built for a different grid");
  }
  if (!field.all_valid()) {
    throw std::invalid_argument("mollify: input field must be fully valid");
  }
  if (region.empty()) throw std::invalid_argument("mollify: empty region");
  for (int a = 0; a < grid.dim_count(); ++a) {
    if (grid.periodic(a)) {
      if (region.hi[a] - region.lo[a] > grid.points(a)) {
        throw std::invalid_argument("mollify: region wider than the periodic axis");
      }
    } else {
      if (region.lo[a] < reach[a] || region.hi[a] > grid.points(a) - reach[a]) {
        throw std::invalid_argument("mollify: region margin smaller than the kernel support");
      }
    }
  }
}

std::vector<int> joint_reach(const Kernel& kernel) {
  std::vector<int> reach(kernel.grid.dim_count(), 0);
  for (int t = 0; t < kernel.tap_count(); ++t) {
    for (int a = 0; a < kernel.grid.dim_count(); ++a) {
      reach[a] = std::max(reach[a], std::abs(kernel.offsets(t, a)));
    }
  }
  return reach;
}

Field convolve_direct(const Field& field, const Kernel& kernel, const IndexBox& region,
                      int deriv_axis) {
  const Grid& grid = field.grid();
  const auto reach = joint_reach(kernel);
  check_region(field, kernel, region, reach);
  const int dim = grid.dim_count();
  const int n = field.component_count();
  const Eigen::ArrayXd& w =
      deriv_axis < 0 ? kernel.weights : kernel.derivative_weights[deriv_axis];
  const double vol = grid.cell_volume();

  // flat-offset fast path applies where no tap read wraps
  std::vector<std::int64_t> tap_flat(kernel.tap_count());
  for (int t = 0; t < kernel.tap_count(); ++t) {
    std::int64_t off = 0;
    for (int a = 0; a < dim; ++a) off += grid.strides()[a] * kernel.offsets(t, a);
    tap_flat[t] = off;
  }

  Field out(grid, n);
  out.mark_valid_only(region);
  BoxIndexer shape;
  shape.reset(region);
  const std::int64_t count = region.count();
  parallel_for(count, [&](std::int64_t begin, std::int64_t end) {
    std::vector<int> idx(dim), src(dim);
    Eigen::VectorXd acc(n);
    for (std::int64_t p = begin; p < end; ++p) {
      shape.unflatten(p, idx);
      bool interior = true;
      for (int a = 0; a < dim; ++a) {
        if (idx[a] - reach[a] < 0 || idx[a] + reach[a] >= grid.points(a)) {
          interior = false;
          break;
        }
      }
      acc.setZero();
      if (interior) {
        const std::int64_t base = grid.flat_index(idx);
        for (int t = 0; t < kernel.tap_count(); ++t) {
          acc += (w[t] * vol) * field.values().col(base - tap_flat[t]);
        }
      } else {
        for (int t = 0; t < kernel.tap_count(); ++t) {
          for (int a = 0; a < dim; ++a) src[a] = idx[a] - kernel.offsets(t, a);
          acc += (w[t] * vol) * field.values().col(grid.flat_index(src));
        }
      }
      out.values().col(grid.flat_index(idx)) = acc;
    }
  });
  return out;
}

Field convolve_separable(const Field& field, const Kernel& kernel, const IndexBox& region,
                         int deriv_axis) {
  const Grid& grid = field.grid();
  const int dim = grid.dim_count();
  const int n = field.component_count();
  std::vector<int> reach(kernel.axis_radius.begin(), kernel.axis_radius.end());
  check_region(field, kernel, region, reach);

  // output box of pass a = target expanded by the radii of the passes to come
  std::vector<IndexBox> out_box(dim);
  out_box[dim - 1] = region;
  for (int a = dim - 2; a >= 0; --a) {
    out_box[a] = out_box[a + 1].expanded_axis(a + 1, kernel.axis_radius[a + 1]);
  }

  BoxBuffer cur, next;
  for (int a = 0; a < dim; ++a) {
    const Eigen::ArrayXd& taps =
        (a == deriv_axis) ? kernel.axis_dweights[a] : kernel.axis_weights[a];
    const int m = kernel.axis_radius[a];
    const double h = grid.spacing(a);
    next.reset(out_box[a], n);
    const std::int64_t count = out_box[a].count();
    const bool from_field = (a == 0);
    parallel_for(count, [&](std::int64_t begin, std::int64_t end) {
      std::vector<int> idx(dim), src(dim);
      Eigen::VectorXd acc(n);
      for (std::int64_t p = begin; p < end; ++p) {
        next.shape.unflatten(p, idx);
        // paired tap order keeps reflection antisymmetry of the derivative
        // taps exact in floating point
        if (from_field) {
          for (int k = 0; k < dim; ++k) src[k] = idx[k];
          src[a] = idx[a];
          acc = (taps[m] * h) * field.values().col(grid.flat_index(src));
          for (int j = 1; j <= m; ++j) {
            src[a] = idx[a] - j;
            const auto minus = field.values().col(grid.flat_index(src));
            src[a] = idx[a] + j;
            const auto plus = field.values().col(grid.flat_index(src));
            acc += (taps[m + j] * h) * minus + (taps[m - j] * h) * plus;
          }
        } else {
          const std::int64_t base = cur.shape.offset_of(idx);
          const std::int64_t stride = cur.shape.strides[a];
          acc = (taps[m] * h) * cur.data.col(base);
          for (int j = 1; j <= m; ++j) {
            acc += (taps[m + j] * h) * cur.data.col(base - j * stride) +
                   (taps[m - j] * h) * cur.data.col(base + j * stride);
          }
        }
        next.data.col(p) = acc;
      }
    });
    std::swap(cur, next);
  }

  Field out(grid, n);
  out.mark_valid_only(region);
  for_each_index(region, [&](std::span<const int> idx) {
    out.values().col(grid.flat_index(idx)) = cur.data.col(cur.shape.offset_of(idx));
  });
  return out;
}

}  // namespace

Kernel make_kernel(const Grid& grid, double epsilon, const std::string& profile) {
  check_epsilon(grid, epsilon);
  if (profile == "bump") return make_radial_kernel(grid, epsilon);
  if (profile == "tensor_bump") return make_tensor_kernel(grid, epsilon);
  throw std::invalid_argument("kernel: unknown profile '" + profile + "'");
}

Field mollify(const Field& field, const Kernel& kernel, const IndexBox& region) {
  return kernel.separable ? convolve_separable(field, kernel, region, -1)
                          : convolve_direct(field, kernel, region, -1);
}

Field mollify(const Field& field, const Kernel& kernel, const InteriorRegion& region) {
  for (int a = 0; a < region.grid().dim_count(); ++a) {
    if (!region.grid().periodic(a) && region.margin(a) < kernel.epsilon * (1.0 - 1e-12)) {
      throw std::invalid_argument("mollify: region margin below the mollification radius");
    }
  }
  return mollify(field, kernel, region.box());
}

Field mollified_derivative(const Field& field, const Kernel& kernel, int axis,
                           const IndexBox& region) {
  if (axis < 0 || axis >= field.grid().dim_count()) {
    throw std::invalid_argument("mollified_derivative: axis out of range");
  }
  return kernel.separable ? convolve_separable(field, kernel, region, axis)
                          : convolve_direct(field, kernel, region, axis);
}

Field mollified_derivative(const Field& field, const Kernel& kernel, int axis,
                           const InteriorRegion& region) {
  for (int a = 0; a < region.grid().dim_count(); ++a) {
    if (!region.grid().periodic(a) && region.margin(a) < kernel.epsilon * (1.0 - 1e-12)) {
      throw std::invalid_argument("mollified_derivative: region margin below the radius");
    }
  }
  return mollified_derivative(field, kernel, axis, region.box());
}

Field mollify_direct(const Field& field, const Kernel& kernel, const IndexBox& region) {
  return convolve_direct(field, kernel, region, -1);
}

Field mollified_derivative_direct(const Field& field, const Kernel& kernel, int axis,
                                  const IndexBox& region) {
  return convolve_direct(field, kernel, region, axis);
}

double snap_epsilon(const Grid& grid, double epsilon) {
  const double h = grid.max_spacing();
  return std::max(1.0, std::round(epsilon / h)) * h;
}

}  // namespace clcons
