#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clcons/field.hpp"
#include "clcons/grid.hpp"
#include "clcons/kernel.hpp"
#include "clcons/system.hpp"
#include "clcons/test_function.hpp"

namespace clcons {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  bool valid = false;
};

/// Ordinary least squares of log(value) against log(epsilon) over the pairs
/// with positive value; needs at least 3 of them.
FitResult fit_loglog_exponent(const std::vector<std::pair<double, double>>& pairs);

struct ScalingPoint {
  double epsilon = 0.0;
  double value = 0.0;
  double bound = 0.0;  // the per-epsilon modulus-based estimate, if any
  double ratio = 0.0;  // value / bound
  bool has_bound = false;
};

/// Measured (epsilon, value) series with its fitted log-log exponent, plus
/// the bound series and its ratio fit when available. `pass` applies
/// the no-degradation rule: ratio slope >= -0.1 and no swept ratio above ten
/// times the one fitted at the largest epsilon.
struct ScalingReport {
  std::string quantity_name;
  std::vector<ScalingPoint> pairs;  // sorted by epsilon descending
  FitResult fit;
  FitResult ratio_fit;
  bool degenerate = false;  // identically zero values
  bool pass = true;
  std::string note;
  std::string region_description;
  double p = 0.0, q = 0.0, s = 0.0, gamma = 0.0;
  std::string kernel_profile;
};

ScalingReport make_scaling_report(std::string quantity, std::vector<ScalingPoint> pairs);

struct BesovResult {
  double seminorm = 0.0;
  std::vector<int> worst_shift;
};

/// sup over nonzero lattice shifts of |x'|^(-s) ||u - u(.-x')||_p on the
/// region, among shifts of physical length at most max_shift_length.
BesovResult besov_seminorm(const Field& field, double p, double s, const InteriorRegion& region,
                           double max_shift_length);

/// The normalized ball-oscillation modulus
///   (1/eps) sum_x vol * avg_{|y-x|<=eps} |u(x)-u(y)|^p,
/// the discrete stand-in for the Besov-VMO smallness quantity. The ball
/// average runs over all lattice points in the closed eps-ball, center
/// included.
double vmo_modulus(const Field& field, double p, double epsilon, const InteriorRegion& region);

/// Mollified-gradient norms max_alpha ||d_alpha(u*eta^eps)||_p against the
/// bound (omega(eps))^(1/p) eps^(-1/p') across the epsilon sweep.
ScalingReport gradient_scaling(const Field& field, double p, const std::string& kernel_profile,
                               const std::vector<double>& epsilons, const InteriorRegion& region);

/// Pointwise flux commutator G_{i,alpha}(u*eta^eps) - G_{i,alpha}(u)*eta^eps,
/// returned as a field with n*(d+1) components in column-major (i, alpha)
/// order. Mollified states stay in the domain by convexity; roundoff-sized
/// excursions are clamped and counted.
Field flux_commutator(const SystemSpec& system, const Field& field, const Kernel& kernel,
                      const IndexBox& region, int* clamp_count = nullptr);
Field flux_commutator(const SystemSpec& system, const Field& field, const Kernel& kernel,
                      const InteriorRegion& region, int* clamp_count = nullptr);

/// Commutator L^q norms against the bound (eps * omega(eps; q(gamma+1)))^(1/q).
ScalingReport commutator_scaling(const SystemSpec& system, const Field& field, double q,
                                 const std::string& kernel_profile,
                                 const std::vector<double>& epsilons,
                                 const InteriorRegion& region, bool with_bounds = true);

/// The mollified companion-law residual R_eps, evaluated in the
/// integrated-by-parts two-term form
///   -int d_alpha(phi) B_i(u^eps) C_{i,alpha}
///   -int phi (DB_i(u^eps) . d_alpha(u^eps)) C_{i,alpha}.
/// For weak solutions this equals int phi d_alpha Q_alpha(u^eps), the
/// integration-by-parts mirror of companion_weak_residual: at a dissipating
/// shock R_eps converges to MINUS the phi-weighted dissipation mass.
double companion_residual_mollified(const SystemSpec& system, const Field& field,
                                    const Kernel& kernel, const TestFunction& phi);

/// int Q_alpha(u) d_alpha(phi) dx: vanishes when the companion law holds; at
/// a dissipating shock with a convex companion it returns +(dissipation mass
/// weighted by phi).
double companion_weak_residual(const SystemSpec& system, const Field& field,
                               const TestFunction& phi);

struct DissipationField {
  Field density;
  double epsilon = 0.0;
  std::string system_name;

  DissipationField(Field f, double eps, std::string name)
      : density(std::move(f)), epsilon(eps), system_name(std::move(name)) {}
};

/// Pointwise D^eps(x) = sum_{i,alpha} B_i(u^eps) d_alpha[C_{i,alpha}](x) with
/// centered differences for the outer derivative, so bounded-axis margins
/// must cover epsilon plus one spacing. Integrating D^eps against a test
/// function reproduces companion_residual_mollified up to O(spacing^2) plus
/// quadrature error.
DissipationField dissipation_density(const SystemSpec& system, const Field& field,
                                     const Kernel& kernel, const InteriorRegion& region);

/// int D^eps phi dx over the valid points of the density.
double integrate_against(const DissipationField& dissipation, const TestFunction& phi);

/// Dyadic epsilons 2^-j inside [lo, hi], snapped to the lattice, descending.
std::vector<double> dyadic_epsilons(const Grid& grid, double lo, double hi);
std::vector<double> default_epsilon_window(const Grid& grid);

}  // namespace clcons
