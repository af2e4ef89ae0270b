#include "clcons/system.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace clcons {

bool SystemSpec::contains(const State& s, double tol) const {
  for (int j = 0; j < n; ++j) {
    if (s[j] < domain_lo[j] - tol || s[j] > domain_hi[j] + tol) return false;
  }
  return true;
}

void SystemSpec::require_in_domain(const State& s, const char* context) const {
  if (!contains(s)) {
    std::ostringstream os;
    os << context << ": state (";
    for (int j = 0; j < n; ++j) os << (j ? "," : "") << s[j];
    os << ") outside the domain of system '" << name << "'";
    throw DomainViolation(os.str());
  }
}

State SystemSpec::clamped(const State& s, bool* clamped_flag) const {
  const double tol = 1e-9 * (1.0 + s.cwiseAbs().maxCoeff());
  State out = s;
  bool touched = false;
  for (int j = 0; j < n; ++j) {
    if (out[j] < domain_lo[j]) {
      if (out[j] < domain_lo[j] - tol) require_in_domain(s, "clamp");
      out[j] = domain_lo[j];
      touched = true;
    } else if (out[j] > domain_hi[j]) {
      if (out[j] > domain_hi[j] + tol) require_in_domain(s, "clamp");
      out[j] = domain_hi[j];
      touched = true;
    }
  }
  if (touched && clamped_flag) *clamped_flag = true;
  return out;
}

CompatibilityResult compatibility_residual(const SystemSpec& system,
                                           const std::vector<State>& sample_states) {
  CompatibilityResult result;
  Eigen::MatrixXd DQ(system.d + 1, system.n);
  Eigen::MatrixXd DG(system.n, system.n);
  Eigen::VectorXd B(system.n);
  for (const State& s : sample_states) {
    system.require_in_domain(s, "compatibility_residual");
    system.companion_gradient(s, DQ);
    system.multiplier(s, B);
    for (int alpha = 0; alpha <= system.d; ++alpha) {
      system.flux_gradient(s, alpha, DG);
      for (int j = 0; j < system.n; ++j) {
        const double r = std::abs(DQ(alpha, j) - B.dot(DG.col(j)));
        if (r > result.max_residual) {
          result.max_residual = r;
          result.worst_j = j;
          result.worst_alpha = alpha;
          result.worst_state = s;
        }
      }
    }
  }
  return result;
}

GrowthReport growth_check(const SystemSpec& system, const std::vector<State>& sample_states,
                          double gamma) {
  GrowthReport report;
  Eigen::VectorXd Q(system.d + 1);
  for (const State& s : sample_states) {
    system.require_in_domain(s, "growth_check");
    system.companion(s, Q);
    const double denom = 1.0 + std::pow(s.norm(), 2.0 + gamma);
    report.max_ratio = std::max(report.max_ratio, Q.cwiseAbs().maxCoeff() / denom);
  }
  report.pass = report.max_ratio <= system.growth_constant * (1.0 + 1e-12);
  return report;
}

double flux_gradient_holder_estimate(const SystemSpec& system,
                                     const std::vector<std::pair<State, State>>& sample_pairs,
                                     double gamma) {
  double worst = 0.0;
  Eigen::MatrixXd DG1(system.n, system.n), DG2(system.n, system.n);
  for (const auto& [s1, s2] : sample_pairs) {
    system.require_in_domain(s1, "flux_gradient_holder_estimate");
    system.require_in_domain(s2, "flux_gradient_holder_estimate");
    const double dist = (s1 - s2).norm();
    if (dist == 0.0) {
      throw std::invalid_argument("flux_gradient_holder_estimate: coincident state pair");
    }
    const double scale = std::pow(dist, gamma);
    for (int alpha = 0; alpha <= system.d; ++alpha) {
      system.flux_gradient(s1, alpha, DG1);
      system.flux_gradient(s2, alpha, DG2);
      for (int i = 0; i < system.n; ++i) {
        worst = std::max(worst, (DG1.row(i) - DG2.row(i)).norm() / scale);
      }
    }
  }
  return worst;
}

Eigen::VectorXd weak_residual(const SystemSpec& system, const Field& field,
                              const TestFunction& phi) {
  const Grid& grid = field.grid();
  if (grid.dim_count() != system.d + 1) {
    throw std::invalid_argument("weak_residual: grid dimension must equal d+1");
  }
  if (field.component_count() != system.n) {
    throw std::invalid_argument("weak_residual: component count mismatch");
  }
  Eigen::VectorXd residual = Eigen::VectorXd::Zero(system.n);
  Eigen::MatrixXd G(system.n, system.d + 1);
  Eigen::VectorXd dphi(system.d + 1);
  for_each_index(phi.support_box(), [&](std::span<const int> idx) {
    const std::int64_t flat = grid.flat_index(idx);
    if (!field.valid(flat)) return;
    for (int alpha = 0; alpha <= system.d; ++alpha) dphi[alpha] = phi.derivative(alpha, idx);
    const State s = field.state(flat);
    system.require_in_domain(s, "weak_residual");
    system.flux(s, G);
    residual.noalias() += G * dphi;
  });
  return residual * grid.cell_volume();
}

double gradient_finite_difference_error(const SystemSpec& system,
                                        const std::vector<State>& sample_states, double step) {
  double worst = 0.0;
  const int n = system.n;
  const int cols = system.d + 1;
  Eigen::MatrixXd Gp(n, cols), Gm(n, cols), DG(n, n);
  Eigen::VectorXd Qp(cols), Qm(cols), Bp(n), Bm(n);
  Eigen::MatrixXd DQ(cols, n), DB(n, n);
  auto update = [&worst](double fd, double an) {
    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  };
  for (const State& s : sample_states) {
    if (system.fd_check_admissible && !system.fd_check_admissible(s)) continue;
    for (int j = 0; j < n; ++j) {
      State sp = s, sm = s;
      sp[j] += step;
      sm[j] -= step;
      if (!system.contains(sp) || !system.contains(sm)) continue;
      system.flux(sp, Gp);
      system.flux(sm, Gm);
      system.companion(sp, Qp);
      system.companion(sm, Qm);
      system.multiplier(sp, Bp);
      system.multiplier(sm, Bm);
      system.companion_gradient(s, DQ);
      system.multiplier_gradient(s, DB);
      for (int alpha = 0; alpha < cols; ++alpha) {
        system.flux_gradient(s, alpha, DG);
        for (int i = 0; i < n; ++i) {
          update((Gp(i, alpha) - Gm(i, alpha)) / (2.0 * step), DG(i, j));
        }
        update((Qp[alpha] - Qm[alpha]) / (2.0 * step), DQ(alpha, j));
      }
      for (int i = 0; i < n; ++i) {
        update((Bp[i] - Bm[i]) / (2.0 * step), DB(i, j));
      }
    }
  }
  return worst;
}

std::vector<State> sample_states(const State& lo, const State& hi, int count,
                                 std::uint64_t seed) {
  if (lo.size() != hi.size()) throw std::invalid_argument("sample_states: box size mismatch");
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1), bit-reproducible
  };
  std::vector<State> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    State s(lo.size());
    for (int j = 0; j < lo.size(); ++j) s[j] = lo[j] + (hi[j] - lo[j]) * unit();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<State> default_box_states(const SystemSpec& system, int count, std::uint64_t seed) {
  // default sampling box: the domain box clipped to a finite range
  State lo = system.domain_lo, hi = system.domain_hi;
  for (int j = 0; j < system.n; ++j) {
    if (!std::isfinite(lo[j])) lo[j] = -10.0;
    if (!std::isfinite(hi[j])) hi[j] = 10.0;
  }
  return sample_states(lo, hi, count, seed);
}

}  // namespace clcons
