#pragma once

#include <cstdint>

#include "clcons/field.hpp"
#include "clcons/grid.hpp"
#include "clcons/system.hpp"
#include "clcons/test_function.hpp"

namespace clcons {

/// Lacunary cosine series sum_k 2^(-k s) cos(2 pi 2^k xi + theta_k) per
/// component, with directions cycling the periodic axes and seeded phases:
/// a synthetic field of prescribed Besov regularity s.
Field weierstrass_field(const Grid& grid, double s, int mode_count, std::uint64_t seed,
                        int component_count = 1);

/// Smooth random-phase cosine sum with k^-2 amplitude decay (plumbing for
/// generic smooth inputs).
Field smooth_modes_field(const Grid& grid, int mode_count, std::uint64_t seed,
                         int component_count = 1);

/// Piecewise two-valued field along the first periodic axis: `high` on the
/// half extent starting at `interface`, `low` on the other, so jumps sit at
/// interface and interface + L/2.
Field step_field(const Grid& grid, double low, double high, double interface);

/// Exact entropy solution of the Burgers Riemann problem sampled on a
/// (time bounded) x (space periodic) grid: a shock along x0 + s t when
/// u_left > u_right, a rarefaction fan otherwise. A compensating static jump
/// sits on the periodic wrap at x0 + L/2; analysis test functions must stay
/// clear of it (see riemann_wrap_band / require_clear_of_wrap).
Field burgers_riemann(const Grid& spacetime_grid, double u_left, double u_right, double x0);

struct WrapBand {
  double center = 0.0;     // wrap-jump position, modulo the spatial extent
  double halfwidth = 0.0;  // contaminated half width at the end time
};

/// The spatial band around the compensating wrap jump that analysis must
/// avoid. For the sampled exact field the jump is a line; fields evolved from
/// the same datum spread it at the maximal wave speed, so pass evolved=true.
WrapBand riemann_wrap_band(const Grid& spacetime_grid, double u_left, double u_right, double x0,
                           bool evolved);

/// Throws unless the test function's spatial support stays `extra_margin`
/// away from the wrap band (spatial axis = axis 1 of the space-time grid).
void require_clear_of_wrap(const TestFunction& phi, const WrapBand& band, double extra_margin);

/// Pre-shock classical solution u = a sin(2 pi (x - u t)) resolved per grid
/// point by safeguarded Newton iteration; requires the grid's time extent to
/// stay below the shock time 1/(2 pi a).
Field burgers_smooth(const Grid& spacetime_grid, double amplitude);

struct FvResult {
  Field spacetime;       // states at every time level, axis 0 = time
  int steps = 0;
  double dt = 0.0;
  double max_mass_drift = 0.0;  // worst per-step drift of a conserved total
  int restarts = 0;
};

/// First-order finite-volume solution (Rusanov flux) of a 1D periodic
/// problem, conservative to roundoff per step. The time step comes from the
/// CFL number against the initial wave speeds; wave-speed growth restarts the
/// run with a halved step down to a floor, below which it aborts.
FvResult fv_solve(const SystemSpec& system, const Field& initial_field, double end_time,
                  double cfl);

}  // namespace clcons
