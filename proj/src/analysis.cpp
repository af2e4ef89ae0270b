#include "clcons/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "clcons/parallel.hpp"

namespace clcons {

FitResult fit_loglog_exponent(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> x, y;
  for (const auto& [eps, value] : pairs) {
    if (eps > 0.0 && value > 0.0 && std::isfinite(value)) {
      x.push_back(std::log(eps));
      y.push_back(std::log(value));
    }
  }
  if (x.size() < 3) {
    throw std::invalid_argument("fit_loglog_exponent: need at least 3 positive pairs");
  }
  const int m = static_cast<int>(x.size());
  double xbar = 0.0, ybar = 0.0;
  for (int i = 0; i < m; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_exponent: all epsilons equal");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points_used = m;
  fit.valid = true;
  return fit;
}

ScalingReport make_scaling_report(std::string quantity, std::vector<ScalingPoint> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const ScalingPoint& a, const ScalingPoint& b) { return a.epsilon > b.epsilon; });
  ScalingReport report;
  report.quantity_name = std::move(quantity);
  report.pairs = std::move(pairs);

  bool all_zero = true;
  std::vector<std::pair<double, double>> value_pairs, ratio_pairs;
  for (const auto& pt : report.pairs) {
    if (pt.value != 0.0) all_zero = false;
    value_pairs.emplace_back(pt.epsilon, pt.value);
    if (pt.has_bound && pt.bound > 0.0) ratio_pairs.emplace_back(pt.epsilon, pt.ratio);
  }
  report.degenerate = all_zero;
  if (report.degenerate) {
    report.note = "degenerate: identically zero";
    return report;
  }
  try {
    report.fit = fit_loglog_exponent(value_pairs);
  } catch (const std::invalid_argument&) {
    report.note = "fit skipped: fewer than 3 positive values";
  }
  if (ratio_pairs.size() >= 3) {
    try {
      report.ratio_fit = fit_loglog_exponent(ratio_pairs);
    } catch (const std::invalid_argument&) {
    }
  }
  if (report.ratio_fit.valid) {
    // bound-degradation rule: the fitted ratio trend must not grow as eps
    // shrinks (slope >= -0.1) and no swept ratio may exceed 10x the ratio at
    // the largest epsilon
    const double ratio_at_largest = report.pairs.front().ratio;
    bool within = true;
    for (const auto& pt : report.pairs) {
      if (pt.has_bound && pt.ratio > 10.0 * ratio_at_largest) within = false;
    }
    report.pass = report.ratio_fit.slope >= -0.1 && within;
    if (!report.pass) report.note = "bound degrades as epsilon shrinks";
  }
  return report;
}

BesovResult besov_seminorm(const Field& field, double p, double s, const InteriorRegion& region,
                           double max_shift_length) {
  if (!(p >= 1.0)) throw std::invalid_argument("besov_seminorm: p must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("besov_seminorm: s must lie in (0,1)");
  const Grid& grid = field.grid();
  field.require_finite("besov_seminorm");
  const int dim = grid.dim_count();
  if (!(max_shift_length >= grid.max_spacing())) {
    throw std::invalid_argument("besov_seminorm: max shift below the grid spacing");
  }

  IndexBox shifts;
  shifts.lo.resize(dim);
  shifts.hi.resize(dim);
  for (int k = 0; k < dim; ++k) {
    const int m = static_cast<int>(std::floor(max_shift_length / grid.spacing(k) * (1 + 1e-12)));
    shifts.lo[k] = -m;
    shifts.hi[k] = m + 1;
  }

  // collect admissible shifts first so the heavy loop parallelizes cleanly
  std::vector<std::vector<int>> offsets;
  std::vector<double> lengths;
  for_each_index(shifts, [&](std::span<const int> off) {
    double len2 = 0.0;
    bool zero = true;
    for (int k = 0; k < dim; ++k) {
      const double x = off[k] * grid.spacing(k);
      len2 += x * x;
      if (off[k] != 0) zero = false;
    }
    const double len = std::sqrt(len2);
    if (zero || len > max_shift_length * (1 + 1e-12)) return;
    offsets.emplace_back(off.begin(), off.end());
    lengths.push_back(len);
  });
  if (offsets.empty()) throw std::invalid_argument("besov_seminorm: empty shift set");

  const int n = field.component_count();
  const double vol = grid.cell_volume();
  std::vector<double> values(offsets.size());
  parallel_for(static_cast<std::int64_t>(offsets.size()),
               [&](std::int64_t begin, std::int64_t end) {
                 std::vector<int> src(dim);
                 for (std::int64_t t = begin; t < end; ++t) {
                   const auto& off = offsets[t];
                   double acc = 0.0;
                   for_each_index(region.box(), [&](std::span<const int> idx) {
                     bool in_range = true;
                     for (int k = 0; k < dim; ++k) {
                       src[k] = idx[k] - off[k];
                       if (!grid.periodic(k) && (src[k] < 0 || src[k] >= grid.points(k))) {
                         in_range = false;
                         break;
                       }
                     }
                     if (!in_range) return;
                     const std::int64_t f0 = grid.flat_index(idx);
                     const std::int64_t f1 = grid.flat_index(src);
                     if (!field.valid(f0) || !field.valid(f1)) return;
                     double d2 = 0.0;
                     for (int c = 0; c < n; ++c) {
                       const double dv = field.value(c, f0) - field.value(c, f1);
                       d2 += dv * dv;
                     }
                     acc += std::pow(std::sqrt(d2), p);
                   });
                   values[t] = std::pow(acc * vol, 1.0 / p) / std::pow(lengths[t], s);
                 }
               });
  BesovResult result;
  for (std::size_t t = 0; t < offsets.size(); ++t) {
    if (values[t] > result.seminorm) {
      result.seminorm = values[t];
      result.worst_shift = offsets[t];
    }
  }
  return result;
}

double vmo_modulus(const Field& field, double p, double epsilon, const InteriorRegion& region) {
  const Grid& grid = field.grid();
  if (!(p >= 1.0)) throw std::invalid_argument("vmo_modulus: p must be >= 1");
  if (!(epsilon >= 2.0 * grid.max_spacing())) {
    throw std::invalid_argument("vmo_modulus: epsilon below twice the spacing");
  }
  for (int k = 0; k < grid.dim_count(); ++k) {
    if (!grid.periodic(k) && region.margin(k) < epsilon * (1.0 - 1e-12)) {
      throw std::invalid_argument("vmo_modulus: region margin below epsilon");
    }
  }
  const int dim = grid.dim_count();
  // closed-ball lattice offsets, center included
  std::vector<std::vector<int>> ball;
  IndexBox around;
  around.lo.resize(dim);
  around.hi.resize(dim);
  for (int k = 0; k < dim; ++k) {
    const int m = static_cast<int>(std::floor(epsilon / grid.spacing(k) * (1 + 1e-12)));
    around.lo[k] = -m;
    around.hi[k] = m + 1;
  }
  for_each_index(around, [&](std::span<const int> off) {
    double len2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double x = off[k] * grid.spacing(k);
      len2 += x * x;
    }
    if (len2 <= epsilon * epsilon * (1 + 1e-12)) ball.emplace_back(off.begin(), off.end());
  });
  if (ball.size() < 2) throw std::invalid_argument("vmo_modulus: ball holds fewer than 2 points");

  const int n = field.component_count();
  const IndexBox& box = region.box();
  std::vector<std::int64_t> strides(dim, 1);
  for (int k = dim - 2; k >= 0; --k) strides[k] = strides[k + 1] * (box.hi[k + 1] - box.lo[k + 1]);
  const std::int64_t count = box.count();
  // chunk partial sums, combined in index order for reproducibility
  std::vector<std::pair<std::int64_t, double>> partial;
  std::mutex partial_mutex;
  parallel_for(count, [&](std::int64_t begin, std::int64_t end) {
    std::vector<int> idx(dim), src(dim);
    double acc = 0.0;
    for (std::int64_t f = begin; f < end; ++f) {
      std::int64_t rem = f;
      for (int k = 0; k < dim; ++k) {
        idx[k] = box.lo[k] + static_cast<int>(rem / strides[k]);
        rem %= strides[k];
      }
      const std::int64_t f0 = grid.flat_index(idx);
      if (!field.valid(f0)) continue;
      double ball_acc = 0.0;
      for (const auto& off : ball) {
        for (int k = 0; k < dim; ++k) src[k] = idx[k] - off[k];
        const std::int64_t f1 = grid.flat_index(src);
        double d2 = 0.0;
        for (int c = 0; c < n; ++c) {
          const double dv = field.value(c, f0) - field.value(c, f1);
          d2 += dv * dv;
        }
        ball_acc += (p == 2.0) ? d2 : std::pow(d2, 0.5 * p);
      }
      acc += ball_acc / static_cast<double>(ball.size());
    }
    std::scoped_lock lock(partial_mutex);
    partial.emplace_back(begin, acc);
  });
  std::sort(partial.begin(), partial.end());
  double total = 0.0;
  for (const auto& [begin, v] : partial) total += v;
  return total * grid.cell_volume() / epsilon;
}

namespace {

std::vector<double> snap_and_sort(const Grid& grid, std::vector<double> epsilons) {
  for (double& e : epsilons) e = snap_epsilon(grid, e);
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  if (epsilons.empty()) throw std::invalid_argument("scaling sweep: empty epsilon list");
  return epsilons;
}

}  // namespace

ScalingReport gradient_scaling(const Field& field, double p, const std::string& kernel_profile,
                               const std::vector<double>& epsilons,
                               const InteriorRegion& region) {
  const Grid& grid = field.grid();
  auto eps_list = snap_and_sort(grid, epsilons);
  const double pprime = p / (p - 1.0);
  std::vector<ScalingPoint> points;
  for (double eps : eps_list) {
    const Kernel kernel = make_kernel(grid, eps, kernel_profile);
    ScalingPoint pt;
    pt.epsilon = eps;
    for (int axis = 0; axis < grid.dim_count(); ++axis) {
      const Field grad = mollified_derivative(field, kernel, axis, region);
      pt.value = std::max(pt.value, field_norm_p(grad, p, region));
    }
    const double omega = vmo_modulus(field, p, eps, region);
    pt.bound = std::pow(omega, 1.0 / p) * std::pow(eps, -1.0 / pprime);
    pt.has_bound = true;
    pt.ratio = pt.bound > 0.0 ? pt.value / pt.bound : 0.0;
    points.push_back(pt);
  }
  ScalingReport report = make_scaling_report("gradient_norm", std::move(points));
  report.p = p;
  report.kernel_profile = kernel_profile;
  report.region_description = region.describe();
  return report;
}

Field flux_commutator(const SystemSpec& system, const Field& field, const Kernel& kernel,
                      const IndexBox& region, int* clamp_count) {
  const Grid& grid = field.grid();
  if (field.component_count() != system.n) {
    throw std::invalid_argument("flux_commutator: component count mismatch");
  }
  const int n = system.n;
  const int cols = system.d + 1;

  const Field u_eps = mollify(field, kernel, region);

  // G(u) is needed wherever the kernel reads: the region padded by the reach
  std::vector<int> reach(grid.dim_count(), 0);
  for (int t = 0; t < kernel.tap_count(); ++t) {
    for (int a = 0; a < grid.dim_count(); ++a) {
      reach[a] = std::max(reach[a], std::abs(kernel.offsets(t, a)));
    }
  }
  IndexBox padded = region.expanded(reach);
  for (int a = 0; a < grid.dim_count(); ++a) {
    if (!grid.periodic(a)) {
      padded.lo[a] = std::max(padded.lo[a], 0);
      padded.hi[a] = std::min(padded.hi[a], grid.points(a));
    } else if (padded.hi[a] - padded.lo[a] > grid.points(a)) {
      padded.lo[a] = 0;
      padded.hi[a] = grid.points(a);
    }
  }

  Field Gu(grid, n * cols);
  {
    std::vector<std::int64_t> strides(grid.dim_count(), 1);
    for (int k = grid.dim_count() - 2; k >= 0; --k) {
      strides[k] = strides[k + 1] * (padded.hi[k + 1] - padded.lo[k + 1]);
    }
    parallel_for(padded.count(), [&](std::int64_t begin, std::int64_t end) {
      std::vector<int> idx(grid.dim_count());
      Eigen::MatrixXd G(n, cols);
      for (std::int64_t f = begin; f < end; ++f) {
        std::int64_t rem = f;
        for (int k = 0; k < grid.dim_count(); ++k) {
          idx[k] = padded.lo[k] + static_cast<int>(rem / strides[k]);
          rem %= strides[k];
        }
        const std::int64_t flat = grid.flat_index(idx);
        const State s = field.state(flat);
        system.require_in_domain(s, "flux_commutator");
        system.flux(s, G);
        Gu.values().col(flat) = Eigen::Map<const Eigen::VectorXd>(G.data(), n * cols);
      }
    });
  }
  const Field Gu_eps = mollify(Gu, kernel, region);

  Field out(grid, n * cols);
  out.mark_valid_only(region);
  std::vector<std::int64_t> strides(grid.dim_count(), 1);
  for (int k = grid.dim_count() - 2; k >= 0; --k) {
    strides[k] = strides[k + 1] * (region.hi[k + 1] - region.lo[k + 1]);
  }
  std::atomic<int> clamped{0};
  parallel_for(region.count(), [&](std::int64_t begin, std::int64_t end) {
    std::vector<int> idx(grid.dim_count());
    Eigen::MatrixXd G(n, cols);
    int local_clamped = 0;
    for (std::int64_t f = begin; f < end; ++f) {
      std::int64_t rem = f;
      for (int k = 0; k < grid.dim_count(); ++k) {
        idx[k] = region.lo[k] + static_cast<int>(rem / strides[k]);
        rem %= strides[k];
      }
      const std::int64_t flat = grid.flat_index(idx);
      bool was_clamped = false;
      const State s = system.clamped(u_eps.state(flat), &was_clamped);
      if (was_clamped) ++local_clamped;
      system.flux(s, G);
      out.values().col(flat) =
          Eigen::Map<const Eigen::VectorXd>(G.data(), n * cols) - Gu_eps.values().col(flat);
    }
    clamped += local_clamped;
  });
  if (clamp_count) *clamp_count = clamped.load();
  return out;
}

Field flux_commutator(const SystemSpec& system, const Field& field, const Kernel& kernel,
                      const InteriorRegion& region, int* clamp_count) {
  return flux_commutator(system, field, kernel, region.box(), clamp_count);
}

ScalingReport commutator_scaling(const SystemSpec& system, const Field& field, double q,
                                 const std::string& kernel_profile,
                                 const std::vector<double>& epsilons,
                                 const InteriorRegion& region, bool with_bounds) {
  if (!(q >= 1.0)) throw std::invalid_argument("commutator_scaling: q must be >= 1");
  const Grid& grid = field.grid();
  auto eps_list = snap_and_sort(grid, epsilons);
  const double p_vmo = q * (system.gamma + 1.0);
  std::vector<ScalingPoint> points;
  for (double eps : eps_list) {
    const Kernel kernel = make_kernel(grid, eps, kernel_profile);
    const Field C = flux_commutator(system, field, kernel, region);
    ScalingPoint pt;
    pt.epsilon = eps;
    for (int c = 0; c < C.component_count(); ++c) {
      pt.value = std::max(pt.value, field_norm_p(C, q, region, c));
    }
    if (with_bounds) {
      const double omega = vmo_modulus(field, p_vmo, eps, region);
      pt.bound = std::pow(eps * omega, 1.0 / q);
      pt.has_bound = true;
      pt.ratio = pt.bound > 0.0 ? pt.value / pt.bound : 0.0;
    }
    points.push_back(pt);
  }
  ScalingReport report = make_scaling_report("commutator_norm", std::move(points));
  report.q = q;
  report.gamma = system.gamma;
  report.kernel_profile = kernel_profile;
  report.region_description = region.describe();
  return report;
}

namespace {

void check_phi_margins(const Grid& grid, const TestFunction& phi, double epsilon) {
  const IndexBox& box = phi.support_box();
  for (int a = 0; a < grid.dim_count(); ++a) {
    if (grid.periodic(a)) continue;
    const double lo_margin = grid.coordinate(a, box.lo[a]);
    const double hi_margin = grid.extent(a) - grid.coordinate(a, box.hi[a] - 1);
    if (lo_margin < epsilon * (1.0 - 1e-12) || hi_margin < epsilon * (1.0 - 1e-12)) {
      throw std::invalid_argument(
          "test function support needs margin >= epsilon on bounded axes");
    }
  }
}

}  // namespace

double companion_residual_mollified(const SystemSpec& system, const Field& field,
                                    const Kernel& kernel, const TestFunction& phi) {
  const Grid& grid = field.grid();
  if (grid.dim_count() != system.d + 1) {
    throw std::invalid_argument("companion_residual_mollified: grid dimension must equal d+1");
  }
  check_phi_margins(grid, phi, kernel.epsilon);
  const IndexBox& box = phi.support_box();
  const int n = system.n;
  const int cols = system.d + 1;

  const Field u_eps = mollify(field, kernel, box);
  std::vector<Field> du;
  du.reserve(cols);
  for (int axis = 0; axis < cols; ++axis) {
    du.push_back(mollified_derivative(field, kernel, axis, box));
  }
  const Field C = flux_commutator(system, field, kernel, box);

  double acc = 0.0;
  Eigen::VectorXd B(n), dphi(cols);
  Eigen::MatrixXd DB(n, n);
  for_each_index(box, [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    const double phi_v = phi.value(idx);
    for (int a = 0; a < cols; ++a) dphi[a] = phi.derivative(a, idx);
    const State s = system.clamped(u_eps.state(flat));
    system.multiplier(s, B);
    system.multiplier_gradient(s, DB);
    double local = 0.0;
    for (int alpha = 0; alpha < cols; ++alpha) {
      for (int i = 0; i < n; ++i) {
        const double c_ia = C.value(i + alpha * n, flat);
        local -= dphi[alpha] * B[i] * c_ia;
        double chain = 0.0;
        for (int j = 0; j < n; ++j) chain += DB(i, j) * du[alpha].value(j, flat);
        local -= phi_v * chain * c_ia;
      }
    }
    acc += local;
  });
  return acc * grid.cell_volume();
}

double companion_weak_residual(const SystemSpec& system, const Field& field,
                               const TestFunction& phi) {
  const Grid& grid = field.grid();
  if (grid.dim_count() != system.d + 1) {
    throw std::invalid_argument("companion_weak_residual: grid dimension must equal d+1");
  }
  if (field.component_count() != system.n) {
    throw std::invalid_argument("companion_weak_residual: component count mismatch");
  }
  double acc = 0.0;
  Eigen::VectorXd Q(system.d + 1);
  for_each_index(phi.support_box(), [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    if (!field.valid(flat)) return;
    const State s = field.state(flat);
    system.require_in_domain(s, "companion_weak_residual");
    system.companion(s, Q);
    for (int alpha = 0; alpha <= system.d; ++alpha) {
      acc += Q[alpha] * phi.derivative(alpha, idx);
    }
  });
  return acc * grid.cell_volume();
}

DissipationField dissipation_density(const SystemSpec& system, const Field& field,
                                     const Kernel& kernel, const InteriorRegion& region) {
  const Grid& grid = field.grid();
  if (grid.dim_count() != system.d + 1) {
    throw std::invalid_argument("dissipation_density: grid dimension must equal d+1");
  }
  const int n = system.n;
  const int cols = system.d + 1;
  // the centered difference needs the commutator one cell beyond the region
  std::vector<int> one(grid.dim_count(), 1);
  IndexBox padded = region.box().expanded(one);
  for (int a = 0; a < grid.dim_count(); ++a) {
    if (grid.periodic(a)) {
      if (padded.hi[a] - padded.lo[a] > grid.points(a)) {
        padded.lo[a] = 0;
        padded.hi[a] = grid.points(a);
      }
    } else if (padded.lo[a] < 0 || padded.hi[a] > grid.points(a)) {
      throw std::invalid_argument("dissipation_density: region margin too small for differencing");
    }
  }
  const Field u_eps = mollify(field, kernel, region.box());
  const Field C = flux_commutator(system, field, kernel, padded);

  Field density(grid, 1);
  density.mark_valid_only(region.box());
  Eigen::VectorXd B(n);
  std::vector<int> plus(grid.dim_count()), minus(grid.dim_count());
  for_each_index(region.box(), [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    const State s = system.clamped(u_eps.state(flat));
    system.multiplier(s, B);
    double v = 0.0;
    for (int alpha = 0; alpha < cols; ++alpha) {
      for (int k = 0; k < grid.dim_count(); ++k) plus[k] = minus[k] = idx[k];
      plus[alpha] = idx[alpha] + 1;
      minus[alpha] = idx[alpha] - 1;
      const std::int64_t fp = grid.flat_index(plus);
      const std::int64_t fm = grid.flat_index(minus);
      const double inv2h = 0.5 / grid.spacing(alpha);
      for (int i = 0; i < n; ++i) {
        v += B[i] * (C.value(i + alpha * n, fp) - C.value(i + alpha * n, fm)) * inv2h;
      }
    }
    density.value(0, flat) = v;
  });
  return DissipationField(std::move(density), kernel.epsilon, system.name);
}

double integrate_against(const DissipationField& dissipation, const TestFunction& phi) {
  const Field& density = dissipation.density;
  const Grid& grid = density.grid();
  double acc = 0.0;
  for_each_index(phi.support_box(), [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    if (!density.valid(flat)) return;
    acc += density.value(0, flat) * phi.value(idx);
  });
  return acc * grid.cell_volume();
}

std::vector<double> dyadic_epsilons(const Grid& grid, double lo, double hi) {
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("dyadic_epsilons: bad window");
  std::vector<double> out;
  const int j_lo = static_cast<int>(std::ceil(std::log2(1.0 / hi) - 1e-9));
  const int j_hi = static_cast<int>(std::floor(std::log2(1.0 / lo) + 1e-9));
  for (int j = j_lo; j <= j_hi; ++j) {
    const double eps = snap_epsilon(grid, std::pow(2.0, -j));
    if (eps >= 2.0 * grid.max_spacing() && eps < 0.5 * grid.min_extent()) out.push_back(eps);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw std::invalid_argument("dyadic_epsilons: window contains no epsilon");
  return out;
}

std::vector<double> default_epsilon_window(const Grid& grid) {
  return dyadic_epsilons(grid, 4.0 * grid.max_spacing(), grid.min_extent() / 8.0);
}

}  // namespace clcons
