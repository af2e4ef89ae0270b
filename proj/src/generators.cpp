#include "clcons/generators.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace clcons {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double unit_from(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1), bit-reproducible
}

std::vector<int> periodic_axes(const Grid& grid) {
  std::vector<int> axes;
  for (int k = 0; k < grid.dim_count(); ++k) {
    if (grid.periodic(k)) axes.push_back(k);
  }
  if (axes.empty()) {
    throw std::invalid_argument("generator: grid needs at least one periodic axis");
  }
  return axes;
}

void check_spacetime(const Grid& grid, const char* who) {
  if (grid.dim_count() != 2 || grid.periodic(0) || !grid.periodic(1)) {
    throw std::invalid_argument(std::string(who) +
                                ": expects a (bounded time) x (periodic space) grid");
  }
}

double wrap_position(double x, double L) {
  double r = std::fmod(x, L);
  return r < 0.0 ? r + L : r;
}

}  // namespace

Field weierstrass_field(const Grid& grid, double s, int mode_count, std::uint64_t seed,
                        int component_count) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("weierstrass: s must lie in (0,1)");
  if (mode_count < 4) throw std::invalid_argument("weierstrass: need at least 4 modes");
  const auto axes = periodic_axes(grid);
  for (int axis : axes) {
    if ((1 << mode_count) > grid.points(axis)) {
      throw std::invalid_argument("weierstrass: top mode unresolved on this grid");
    }
  }
  std::mt19937_64 rng(seed);
  // phases drawn in (component, mode) order
  std::vector<std::vector<double>> theta(component_count, std::vector<double>(mode_count));
  for (int c = 0; c < component_count; ++c) {
    for (int k = 0; k < mode_count; ++k) theta[c][k] = kTwoPi * unit_from(rng);
  }
  Field field(grid, component_count);
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    for (int c = 0; c < component_count; ++c) {
      double v = 0.0;
      for (int k = 0; k < mode_count; ++k) {
        const int axis = axes[k % axes.size()];
        const double xi = grid.coordinate(axis, idx[axis]) / grid.extent(axis);
        v += std::pow(2.0, -k * s) * std::cos(kTwoPi * std::ldexp(1.0, k) * xi + theta[c][k]);
      }
      field.value(c, flat) = v;
    }
    ++flat;
  });
  return field;
}

Field smooth_modes_field(const Grid& grid, int mode_count, std::uint64_t seed,
                         int component_count) {
  if (mode_count < 1) throw std::invalid_argument("smooth_modes: need at least 1 mode");
  const auto axes = periodic_axes(grid);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> theta(component_count, std::vector<double>(mode_count));
  for (int c = 0; c < component_count; ++c) {
    for (int k = 0; k < mode_count; ++k) theta[c][k] = kTwoPi * unit_from(rng);
  }
  Field field(grid, component_count);
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    for (int c = 0; c < component_count; ++c) {
      double v = 0.0;
      for (int k = 0; k < mode_count; ++k) {
        const int axis = axes[k % axes.size()];
        const double xi = grid.coordinate(axis, idx[axis]) / grid.extent(axis);
        v += std::cos(kTwoPi * (k + 1) * xi + theta[c][k]) / ((k + 1.0) * (k + 1.0));
      }
      field.value(c, flat) = v;
    }
    ++flat;
  });
  return field;
}

Field step_field(const Grid& grid, double low, double high, double interface) {
  const auto axes = periodic_axes(grid);
  const int axis = axes.front();
  const double L = grid.extent(axis);
  Field field(grid, 1);
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    const double a = wrap_position(grid.coordinate(axis, idx[axis]) - interface, L);
    field.value(0, flat++) = (a < 0.5 * L) ? high : low;
  });
  return field;
}

Field burgers_riemann(const Grid& grid, double u_left, double u_right, double x0) {
  check_spacetime(grid, "burgers_riemann");
  if (u_left == u_right) {
    throw std::invalid_argument("burgers_riemann: degenerate datum u_left == u_right");
  }
  const double T = grid.extent(0);
  const double L = grid.extent(1);
  const double safety = 4.0 * grid.spacing(1);
  const double shock_speed = 0.5 * (u_left + u_right);
  if (u_left > u_right) {
    // the shock must not run into the wrap jump at x0 + L/2
    if (std::abs(shock_speed) * T > 0.5 * L - safety) {
      throw std::invalid_argument("burgers_riemann: shock reaches the wrap jump before end time");
    }
  } else {
    // the rarefaction edges travel at u_left and u_right
    if (std::max(std::abs(u_left), std::abs(u_right)) * T > 0.5 * L - safety) {
      throw std::invalid_argument("burgers_riemann: fan reaches the wrap jump before end time");
    }
  }

  Field field(grid, 1);
  std::int64_t flat = 0;
  const double wrap_x = wrap_position(x0 + 0.5 * L, L);
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    const double t = grid.coordinate(0, idx[0]);
    const double x = grid.coordinate(1, idx[1]);
    double u;
    if (u_left > u_right) {
      // u_left on the arc from the wrap line to the shock, u_right beyond
      const double a = wrap_position(x - wrap_x, L);
      const double b = wrap_position(x0 + shock_speed * t - wrap_x, L);
      u = (a < b) ? u_left : u_right;
    } else {
      double dx = x - x0;
      dx -= L * std::round(dx / L);  // fan coordinates in [-L/2, L/2)
      if (t <= 0.0) {
        u = dx < 0.0 ? u_left : u_right;
      } else if (dx <= u_left * t) {
        u = u_left;
      } else if (dx >= u_right * t) {
        u = u_right;
      } else {
        u = dx / t;
      }
    }
    field.value(0, flat++) = u;
  });
  return field;
}

WrapBand riemann_wrap_band(const Grid& grid, double u_left, double u_right, double x0,
                           bool evolved) {
  check_spacetime(grid, "riemann_wrap_band");
  WrapBand band;
  const double L = grid.extent(1);
  band.center = wrap_position(x0 + 0.5 * L, L);
  band.halfwidth =
      evolved ? std::max(std::abs(u_left), std::abs(u_right)) * grid.extent(0) : 0.0;
  return band;
}

void require_clear_of_wrap(const TestFunction& phi, const WrapBand& band, double extra_margin) {
  const Grid& grid = phi.grid();
  check_spacetime(grid, "require_clear_of_wrap");
  const double L = grid.extent(1);
  double dx = phi.center()[1] - band.center;
  dx -= L * std::round(dx / L);
  const double clearance = std::abs(dx) - phi.radius()[1] - band.halfwidth;
  if (clearance < extra_margin) {
    std::ostringstream os;
    os << "test function support too close to the periodic wrap jump (clearance " << clearance
       << " < required " << extra_margin << ")";
    throw std::invalid_argument(os.str());
  }
}

Field burgers_smooth(const Grid& grid, double amplitude) {
  check_spacetime(grid, "burgers_smooth");
  const double T = grid.extent(0);
  if (amplitude != 0.0 && !(T < 1.0 / (kTwoPi * std::abs(amplitude)))) {
    throw std::invalid_argument("burgers_smooth: end time is not strictly pre-shock");
  }
  Field field(grid, 1);
  const double a = amplitude;
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    const double t = grid.coordinate(0, idx[0]);
    const double x = grid.coordinate(1, idx[1]);
    if (a == 0.0) {
      field.value(0, flat++) = 0.0;
      return;
    }
    // solve u = a sin(2 pi (x - u t)): strictly monotone since 2 pi |a| t < 1
    double lo = -std::abs(a), hi = std::abs(a);
    double u = a * std::sin(kTwoPi * x);
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      const double g = u - a * std::sin(kTwoPi * (x - u * t));
      if (std::abs(g) <= 1e-12) {
        converged = true;
        break;
      }
      (g > 0.0 ? hi : lo) = u;
      const double dg = 1.0 + kTwoPi * a * t * std::cos(kTwoPi * (x - u * t));
      double next = u - g / dg;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
      u = next;
    }
    if (!converged) {
      throw std::runtime_error("burgers_smooth: characteristic solve failed to converge");
    }
    field.value(0, flat++) = u;
  });
  return field;
}

FvResult fv_solve(const SystemSpec& system, const Field& initial_field, double end_time,
                  double cfl) {
  if (system.d != 1) throw std::invalid_argument("fv_solve: only 1D systems supported");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("fv_solve: cfl must lie in (0,1]");
  if (!(end_time > 0.0)) throw std::invalid_argument("fv_solve: end time must be positive");
  if (!system.max_wave_speed) {
    throw std::invalid_argument("fv_solve: system lacks a wave-speed bound");
  }
  if (!system.state_from_conserved) {
    throw std::invalid_argument("fv_solve: system lacks a conserved-to-state map");
  }
  const Grid& sgrid = initial_field.grid();
  if (sgrid.dim_count() != 1 || !sgrid.periodic(0)) {
    throw std::invalid_argument("fv_solve: initial field must live on a 1D periodic grid");
  }
  if (initial_field.component_count() != system.n) {
    throw std::invalid_argument("fv_solve: component count mismatch");
  }
  const int nx = sgrid.points(0);
  const int n = system.n;
  const double h = sgrid.spacing(0);

  Eigen::MatrixXd u0 = initial_field.values();
  double speed0 = 0.0;
  Eigen::MatrixXd G(n, 2);
  for (int j = 0; j < nx; ++j) {
    system.require_in_domain(u0.col(j), "fv_solve initial data");
    speed0 = std::max(speed0, system.max_wave_speed(u0.col(j)));
  }
  if (!(speed0 > 0.0)) speed0 = 1.0 / end_time;  // still waters: one step per unit time

  int steps = std::max(1, static_cast<int>(std::ceil(end_time * speed0 / (cfl * h))));
  const double dt_floor = (end_time / steps) / 1024.0;

  for (int attempt = 0;; ++attempt) {
    const double dt = end_time / steps;
    if (dt < dt_floor) {
      throw DomainViolation("fv_solve: time step fell below the floor (wave-speed blow-up)");
    }
    Grid tgrid({steps + 1, nx}, {end_time, sgrid.extent(0)}, {false, true});
    Field snapshots(tgrid, n);

    Eigen::MatrixXd w(n, nx), state(n, nx), flux_num(n, nx);
    Eigen::VectorXd speeds(nx);
    state = u0;
    for (int j = 0; j < nx; ++j) {
      system.flux(state.col(j), G);
      w.col(j) = G.col(0);
    }
    Eigen::VectorXd mass_prev(n), mass(n);
    for (int i = 0; i < n; ++i) mass_prev[i] = w.row(i).sum();

    snapshots.values().block(0, 0, n, nx) = state;
    bool cfl_violated = false;
    double max_drift = 0.0;
    Eigen::MatrixXd phys_flux(n, nx);

    for (int step = 0; step < steps && !cfl_violated; ++step) {
      double smax = 0.0;
      for (int j = 0; j < nx; ++j) {
        speeds[j] = system.max_wave_speed(state.col(j));
        smax = std::max(smax, speeds[j]);
        system.flux(state.col(j), G);
        phys_flux.col(j) = G.col(1);
      }
      if (dt * smax / h > std::min(1.0, cfl * 1.0000001)) {
        cfl_violated = true;
        break;
      }
      for (int j = 0; j < nx; ++j) {
        const int jp = (j + 1) % nx;
        const double a = std::max(speeds[j], speeds[jp]);
        flux_num.col(j) = 0.5 * (phys_flux.col(j) + phys_flux.col(jp)) -
                          0.5 * a * (w.col(jp) - w.col(j));
      }
      const double lambda = dt / h;
      for (int j = 0; j < nx; ++j) {
        const int jm = (j + nx - 1) % nx;
        w.col(j) -= lambda * (flux_num.col(j) - flux_num.col(jm));
      }
      for (int j = 0; j < nx; ++j) {
        Eigen::VectorXd s(n);
        try {
          system.state_from_conserved(w.col(j), s);
        } catch (const DomainViolation&) {
          std::ostringstream os;
          os << "fv_solve: state left the domain at t=" << (step + 1) * dt << ", cell " << j;
          throw DomainViolation(os.str());
        }
        if (!system.contains(s)) {
          std::ostringstream os;
          os << "fv_solve: state left the domain at t=" << (step + 1) * dt << ", cell " << j;
          throw DomainViolation(os.str());
        }
        state.col(j) = s;
      }
      for (int i = 0; i < n; ++i) mass[i] = w.row(i).sum();
      max_drift = std::max(max_drift, (mass - mass_prev).cwiseAbs().maxCoeff() * h);
      mass_prev = mass;
      snapshots.values().block(0, static_cast<std::int64_t>(step + 1) * nx, n, nx) = state;
    }
    if (!cfl_violated) {
      return FvResult{std::move(snapshots), steps, dt, max_drift, attempt};
    }
    steps *= 2;  // wave speeds grew: halve the step and rerun
  }
}

}  // namespace clcons
