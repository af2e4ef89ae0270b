#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clcons/field.hpp"
#include "clcons/grid.hpp"
#include "clcons/test_function.hpp"

namespace clcons {

using State = Eigen::VectorXd;

/// Raised when a state leaves the admissible domain or a solver run hits a
/// data-dependent abort (vacuum density, CFL floor). Maps to CLI exit 3.
class DomainViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A first-order system of n conservation laws in d space dimensions with a
/// companion law. Flux direction alpha runs 0..d with alpha = 0 the time
/// direction. The evaluators are pure; all gradients are analytic.
///
///   flux(s, G)                G(i, alpha)         n x (d+1)
///   flux_gradient(s, a, DG)   DG(i, j) = dG_{i,a}/ds_j   n x n
///   companion(s, Q)           Q(alpha)            d+1
///   companion_gradient(s, DQ) DQ(alpha, j)        (d+1) x n
///   multiplier(s, B)          B(i)                n
///   multiplier_gradient(s,DB) DB(i, j)            n x n
struct SystemSpec {
  std::string name;
  int n = 1;
  int d = 1;
  State domain_lo;  // component-wise box, +-infinity allowed
  State domain_hi;
  double gamma = 1.0;            // Hoelder exponent claimed for the flux gradient
  double gamma_effective = 1.0;  // on the working state box (may be better)
  double growth_constant = 1.0;

  std::function<void(const State&, Eigen::Ref<Eigen::MatrixXd>)> flux;
  std::function<void(const State&, int, Eigen::Ref<Eigen::MatrixXd>)> flux_gradient;
  std::function<void(const State&, Eigen::Ref<Eigen::VectorXd>)> companion;
  std::function<void(const State&, Eigen::Ref<Eigen::MatrixXd>)> companion_gradient;
  std::function<void(const State&, Eigen::Ref<Eigen::VectorXd>)> multiplier;
  std::function<void(const State&, Eigen::Ref<Eigen::MatrixXd>)> multiplier_gradient;

  // finite-volume hooks
  std::function<double(const State&)> max_wave_speed;
  std::function<void(const Eigen::VectorXd&, Eigen::Ref<State>)> state_from_conserved;

  /// States this close to a flux-regularity degeneracy (e.g. F = 0 for the
  /// power-law p-system) are skipped by finite-difference validation; the
  /// difference quotient measures the kink there, not the gradient.
  std::function<bool(const State&)> fd_check_admissible;

  bool contains(const State& s, double tol = 0.0) const;
  void require_in_domain(const State& s, const char* context) const;
  /// Pulls a state back into the numeric domain box; only roundoff-sized
  /// excursions are tolerated (mollified states stay inside by convexity).
  State clamped(const State& s, bool* clamped_flag = nullptr) const;
};

struct CompatibilityResult {
  double max_residual = 0.0;
  int worst_j = -1;
  int worst_alpha = -1;
  State worst_state;
};

/// Worst-case defect of dQ_alpha/ds_j = sum_i B_i dG_{i,alpha}/ds_j over the
/// sampled states: the defining structural requirement of a companion law.
CompatibilityResult compatibility_residual(const SystemSpec& system,
                                           const std::vector<State>& sample_states);

struct GrowthReport {
  double max_ratio = 0.0;
  bool pass = false;
};

/// max |Q_alpha(s)| / (1 + |s|^(2+gamma)); passes when it stays below the
/// system's growth constant.
GrowthReport growth_check(const SystemSpec& system, const std::vector<State>& sample_states,
                          double gamma);

/// Largest Hoelder quotient |DG(s1) - DG(s2)| / |s1 - s2|^gamma over the
/// sampled pairs (Euclidean norm over the state-gradient index).
double flux_gradient_holder_estimate(const SystemSpec& system,
                                     const std::vector<std::pair<State, State>>& sample_pairs,
                                     double gamma);

/// Weak-form residual of the system against one test function: component i is
/// sum_alpha int G_{i,alpha}(u) d_alpha phi dx by the grid quadrature.
Eigen::VectorXd weak_residual(const SystemSpec& system, const Field& field,
                              const TestFunction& phi);

/// Agreement of the analytic gradients with central finite differences at the
/// given states; returns the worst |fd - analytic| / max(1, |analytic|).
double gradient_finite_difference_error(const SystemSpec& system,
                                        const std::vector<State>& sample_states,
                                        double step = 1e-5);

/// Deterministic uniform samples of a state box.
std::vector<State> sample_states(const State& lo, const State& hi, int count,
                                 std::uint64_t seed);
std::vector<State> default_box_states(const SystemSpec& system, int count, std::uint64_t seed);

// built-in systems
SystemSpec burgers_system();
SystemSpec euler_system(int d, double kappa, double gamma0, const State& box_lo,
                        const State& box_hi);
SystemSpec euler_system(int d = 1, double kappa = 1.0, double gamma0 = 1.5);

struct StoredEnergy {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  double gamma = 0.5;
};
SystemSpec psystem_elasticity(double gamma);
SystemSpec psystem_elasticity(const StoredEnergy& energy);

/// Systems defined by polynomial/power flux terms in a JSON file; see
/// docs/custom_systems.md for the schema.
SystemSpec load_custom_system(const std::string& path);
SystemSpec parse_custom_system(const std::string& json_text);

SystemSpec make_named_system(const std::string& name, double kappa, double gamma0, int d,
                             double gamma, const std::string& custom_file = "");

}  // namespace clcons
