#include <cmath>
#include <limits>
#include <stdexcept>

#include "clcons/system.hpp"

namespace clcons {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Default growth constant: the largest growth ratio |Q|/(1+|s|^(2+gamma)) seen
/// over a deterministic sample of the default box, with a little headroom so
/// later seeded checks on the same box stay below it.
double computed_growth_constant(const SystemSpec& sys) {
  auto states = default_box_states(sys, 20000, 0x9e3779b97f4a7c15ULL);
  Eigen::VectorXd Q(sys.d + 1);
  double worst = 0.0;
  for (const State& s : states) {
    sys.companion(s, Q);
    const double denom = 1.0 + std::pow(s.norm(), 2.0 + sys.gamma);
    worst = std::max(worst, Q.cwiseAbs().maxCoeff() / denom);
  }
  return worst * 1.02;
}

}  // namespace

SystemSpec burgers_system() {
  SystemSpec sys;
  sys.name = "burgers";
  sys.n = 1;
  sys.d = 1;
  sys.domain_lo = State::Constant(1, -kInf);
  sys.domain_hi = State::Constant(1, kInf);
  sys.gamma = 1.0;
  sys.gamma_effective = 1.0;
  sys.flux = [](const State& s, Eigen::Ref<Eigen::MatrixXd> G) {
    G(0, 0) = s[0];
    G(0, 1) = 0.5 * s[0] * s[0];
  };
  sys.flux_gradient = [](const State& s, int alpha, Eigen::Ref<Eigen::MatrixXd> DG) {
    DG(0, 0) = alpha == 0 ? 1.0 : s[0];
  };
  sys.companion = [](const State& s, Eigen::Ref<Eigen::VectorXd> Q) {
    Q[0] = 0.5 * s[0] * s[0];
    Q[1] = s[0] * s[0] * s[0] / 3.0;
  };
  sys.companion_gradient = [](const State& s, Eigen::Ref<Eigen::MatrixXd> DQ) {
    DQ(0, 0) = s[0];
    DQ(1, 0) = s[0] * s[0];
  };
  sys.multiplier = [](const State& s, Eigen::Ref<Eigen::VectorXd> B) { B[0] = s[0]; };
  sys.multiplier_gradient = [](const State&, Eigen::Ref<Eigen::MatrixXd> DB) { DB(0, 0) = 1.0; };
  sys.max_wave_speed = [](const State& s) { return std::abs(s[0]); };
  sys.state_from_conserved = [](const Eigen::VectorXd& w, Eigen::Ref<State> s) { s = w; };
  sys.growth_constant = computed_growth_constant(sys);
  return sys;
}

SystemSpec euler_system(int d, double kappa, double gamma0, const State& box_lo,
                        const State& box_hi) {
  if (d < 1) throw std::invalid_argument("euler: d must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("euler: kappa must be positive");
  if (!(gamma0 > 1.0 && gamma0 < 2.0)) {
    throw std::invalid_argument("euler: gamma0 must lie in (1,2)");
  }
  const int n = d + 1;
  if (box_lo.size() != n || box_hi.size() != n) {
    throw std::invalid_argument("euler: state box size must be d+1");
  }
  if (!(box_lo[0] > 0.0)) throw std::invalid_argument("euler: rho_min must be positive");

  // pressure p = kappa rho^gamma0 and the pressure potential
  // P(rho) = rho * int_1^rho p(r)/r^2 dr = kappa (rho^gamma0 - rho)/(gamma0 - 1)
  auto p = [kappa, gamma0](double rho) { return kappa * std::pow(rho, gamma0); };
  auto dp = [kappa, gamma0](double rho) { return kappa * gamma0 * std::pow(rho, gamma0 - 1.0); };
  auto P = [kappa, gamma0](double rho) {
    return kappa * (std::pow(rho, gamma0) - rho) / (gamma0 - 1.0);
  };
  auto dP = [kappa, gamma0](double rho) {
    return kappa * (gamma0 * std::pow(rho, gamma0 - 1.0) - 1.0) / (gamma0 - 1.0);
  };
  auto ddP = [kappa, gamma0](double rho) { return kappa * gamma0 * std::pow(rho, gamma0 - 2.0); };

  SystemSpec sys;
  sys.name = "euler";
  sys.n = n;
  sys.d = d;
  sys.domain_lo = box_lo;
  sys.domain_hi = box_hi;
  sys.gamma = gamma0 - 1.0;   // C^{1,gamma0-1} on the closed half-space
  sys.gamma_effective = 1.0;  // the box keeps the density away from vacuum

  sys.flux = [n, d, p](const State& s, Eigen::Ref<Eigen::MatrixXd> G) {
    const double rho = s[0];
    G(0, 0) = rho;
    for (int i = 1; i < n; ++i) G(i, 0) = rho * s[i];
    for (int j = 1; j <= d; ++j) {
      G(0, j) = rho * s[j];
      for (int i = 1; i < n; ++i) {
        G(i, j) = rho * s[i] * s[j] + (i == j ? p(rho) : 0.0);
      }
    }
  };
  sys.flux_gradient = [n, d, dp](const State& s, int alpha, Eigen::Ref<Eigen::MatrixXd> DG) {
    const double rho = s[0];
    DG.setZero();
    if (alpha == 0) {
      DG(0, 0) = 1.0;
      for (int i = 1; i < n; ++i) {
        DG(i, 0) = s[i];
        DG(i, i) = rho;
      }
    } else {
      const int j = alpha;
      DG(0, 0) = s[j];
      DG(0, j) = rho;
      for (int i = 1; i < n; ++i) {
        DG(i, 0) = s[i] * s[j] + (i == j ? dp(rho) : 0.0);
        DG(i, i) += rho * s[j];
        DG(i, j) += rho * s[i];
      }
    }
  };
  sys.companion = [n, d, p, P](const State& s, Eigen::Ref<Eigen::VectorXd> Q) {
    const double rho = s[0];
    const double v2 = s.tail(n - 1).squaredNorm();
    const double E = 0.5 * rho * v2 + P(rho);
    Q[0] = E;
    for (int j = 1; j <= d; ++j) Q[j] = (E + p(rho)) * s[j];
  };
  sys.companion_gradient = [n, d, p, dp, P, dP](const State& s,
                                                Eigen::Ref<Eigen::MatrixXd> DQ) {
    const double rho = s[0];
    const double v2 = s.tail(n - 1).squaredNorm();
    const double E = 0.5 * rho * v2 + P(rho);
    DQ.setZero();
    DQ(0, 0) = 0.5 * v2 + dP(rho);
    for (int k = 1; k < n; ++k) DQ(0, k) = rho * s[k];
    for (int j = 1; j <= d; ++j) {
      DQ(j, 0) = (0.5 * v2 + dP(rho) + dp(rho)) * s[j];
      for (int k = 1; k < n; ++k) {
        DQ(j, k) = rho * s[k] * s[j] + (k == j ? E + p(rho) : 0.0);
      }
    }
  };
  sys.multiplier = [n, dP](const State& s, Eigen::Ref<Eigen::VectorXd> B) {
    const double v2 = s.tail(n - 1).squaredNorm();
    B[0] = -0.5 * v2 + dP(s[0]);
    for (int i = 1; i < n; ++i) B[i] = s[i];
  };
  sys.multiplier_gradient = [n, ddP](const State& s, Eigen::Ref<Eigen::MatrixXd> DB) {
    DB.setZero();
    DB(0, 0) = ddP(s[0]);
    for (int k = 1; k < n; ++k) DB(0, k) = -s[k];
    for (int i = 1; i < n; ++i) DB(i, i) = 1.0;
  };
  sys.max_wave_speed = [n, dp](const State& s) {
    return s.tail(n - 1).norm() + std::sqrt(dp(s[0]));
  };
  sys.state_from_conserved = [n](const Eigen::VectorXd& w, Eigen::Ref<State> s) {
    if (!(w[0] > 0.0)) {
      throw DomainViolation("euler: non-positive density in conserved state");
    }
    s[0] = w[0];
    for (int i = 1; i < n; ++i) s[i] = w[i] / w[0];
  };
  sys.growth_constant = computed_growth_constant(sys);
  return sys;
}

SystemSpec euler_system(int d, double kappa, double gamma0) {
  State lo(d + 1), hi(d + 1);
  lo[0] = 0.1;
  hi[0] = 10.0;
  for (int i = 1; i <= d; ++i) {
    lo[i] = -5.0;
    hi[i] = 5.0;
  }
  return euler_system(d, kappa, gamma0, lo, hi);
}

SystemSpec psystem_elasticity(const StoredEnergy& energy) {
  if (!(energy.gamma > 0.0 && energy.gamma < 1.0)) {
    throw std::invalid_argument("psystem: gamma must lie in (0,1)");
  }
  SystemSpec sys;
  sys.name = "psystem";
  sys.n = 2;
  sys.d = 1;
  sys.domain_lo = State::Constant(2, -kInf);
  sys.domain_hi = State::Constant(2, kInf);
  sys.gamma = energy.gamma;
  sys.gamma_effective = energy.gamma;
  const auto W = energy.value;
  const auto dW = energy.derivative;
  const auto ddW = energy.second_derivative;

  // state (v, F); time flux (v, F), space flux (-W'(F), -v) so that the
  // divergence form recovers  v_t = (W'(F))_x,  F_t = v_x
  sys.flux = [dW](const State& s, Eigen::Ref<Eigen::MatrixXd> G) {
    G(0, 0) = s[0];
    G(1, 0) = s[1];
    G(0, 1) = -dW(s[1]);
    G(1, 1) = -s[0];
  };
  sys.flux_gradient = [ddW](const State& s, int alpha, Eigen::Ref<Eigen::MatrixXd> DG) {
    DG.setZero();
    if (alpha == 0) {
      DG(0, 0) = 1.0;
      DG(1, 1) = 1.0;
    } else {
      DG(0, 1) = -ddW(s[1]);
      DG(1, 0) = -1.0;
    }
  };
  sys.companion = [W, dW](const State& s, Eigen::Ref<Eigen::VectorXd> Q) {
    Q[0] = 0.5 * s[0] * s[0] + W(s[1]);
    Q[1] = -s[0] * dW(s[1]);
  };
  sys.companion_gradient = [dW, ddW](const State& s, Eigen::Ref<Eigen::MatrixXd> DQ) {
    DQ(0, 0) = s[0];
    DQ(0, 1) = dW(s[1]);
    DQ(1, 0) = -dW(s[1]);
    DQ(1, 1) = -s[0] * ddW(s[1]);
  };
  sys.multiplier = [dW](const State& s, Eigen::Ref<Eigen::VectorXd> B) {
    B[0] = s[0];
    B[1] = dW(s[1]);
  };
  sys.multiplier_gradient = [ddW](const State& s, Eigen::Ref<Eigen::MatrixXd> DB) {
    DB.setZero();
    DB(0, 0) = 1.0;
    DB(1, 1) = ddW(s[1]);
  };
  sys.max_wave_speed = [ddW](const State& s) { return std::sqrt(std::max(0.0, ddW(s[1]))); };
  sys.state_from_conserved = [](const Eigen::VectorXd& w, Eigen::Ref<State> s) { s = w; };
  sys.fd_check_admissible = [](const State& s) { return std::abs(s[1]) >= 0.01; };
  sys.growth_constant = computed_growth_constant(sys);
  return sys;
}

SystemSpec psystem_elasticity(double gamma) {
  StoredEnergy energy;
  energy.gamma = gamma;
  // W(F) = |F|^(2+gamma) / ((2+gamma)(1+gamma)); W' is C^{1,gamma} exactly,
  // with W'(0) = W''(0) = 0 the degenerate point
  energy.value = [gamma](double F) {
    return std::pow(std::abs(F), 2.0 + gamma) / ((2.0 + gamma) * (1.0 + gamma));
  };
  energy.derivative = [gamma](double F) {
    const double a = std::abs(F);
    return (F >= 0.0 ? 1.0 : -1.0) * std::pow(a, 1.0 + gamma) / (1.0 + gamma);
  };
  energy.second_derivative = [gamma](double F) { return std::pow(std::abs(F), gamma); };
  return psystem_elasticity(energy);
}

}  // namespace clcons
