#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "clcons/generators.hpp"
#include "clcons/system.hpp"
#include "clcons/test_function.hpp"
#include "oracles.hpp"

using namespace clcons;

namespace {

State state1(double a) {
  State s(1);
  s << a;
  return s;
}

State state2(double a, double b) {
  State s(2);
  s << a, b;
  return s;
}

}  // namespace

TEST_CASE("burgers entropy pair satisfies the compatibility identity") {
  const SystemSpec sys = burgers_system();

  Eigen::MatrixXd DQ(2, 1);
  sys.companion_gradient(state1(2.0), DQ);
  CHECK(DQ(1, 0) == doctest::Approx(4.0).epsilon(1e-15));  // d/du u^3/3 = u^2

  // at u=3: DQ_1 = 9 against B*DG_01 = 3*3
  Eigen::MatrixXd DG(1, 1);
  Eigen::VectorXd B(1);
  sys.flux_gradient(state1(3.0), 1, DG);
  sys.multiplier(state1(3.0), B);
  sys.companion_gradient(state1(3.0), DQ);
  CHECK(DQ(1, 0) == B[0] * DG(0, 0));

  const CompatibilityResult r =
      compatibility_residual(sys, {state1(-1.0), state1(0.5), state1(2.0)});
  CHECK(r.max_residual <= 1e-12);

  SystemSpec loose = sys;
  loose.growth_constant = 1.0;
  const GrowthReport growth = growth_check(loose, sample_states(state1(-10), state1(10), 512, 3),
                                           1.0);
  CHECK(growth.pass);  // |u^3/3| <= 1 + |u|^3
}

TEST_CASE("euler pressure potential, multipliers and compatibility") {
  const SystemSpec sys = euler_system(1, 1.0, 1.5);

  // P(rho) = kappa (rho^g0 - rho)/(g0 - 1): P(4) = 2*4^1.5 - 2*4 = 8
  Eigen::VectorXd Q(2);
  sys.companion(state2(4.0, 0.0), Q);
  CHECK(Q[0] == doctest::Approx(8.0).epsilon(1e-14));  // no kinetic part at v=0

  sys.companion(state2(1.0, 0.0), Q);
  CHECK(Q[0] == doctest::Approx(0.0).epsilon(1e-14));  // P(1) = 0

  Eigen::VectorXd B(2);
  sys.multiplier(state2(1.0, 2.0), B);
  CHECK(B[0] == doctest::Approx(-1.0).epsilon(1e-14));  // -2 + P'(1), P' = 3 sqrt(rho) - 2
  CHECK(B[1] == 2.0);

  // hand-derived identity at (rho, v) = (4, 0): dQ0/drho = P'(4) = B0 * dG00/drho
  Eigen::MatrixXd DQ(2, 2);
  sys.companion_gradient(state2(4.0, 0.0), DQ);
  CHECK(DQ(0, 0) == doctest::Approx(4.0).epsilon(1e-14));

  const auto states = default_box_states(sys, 1000, 21);
  CHECK(compatibility_residual(sys, states).max_residual <= 1e-8);
  CHECK(gradient_finite_difference_error(sys, states) <= 1e-5);

  CHECK_THROWS_AS(euler_system(1, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(euler_system(1, 1.0, 1.0), std::invalid_argument);
  State lo(2), hi(2);
  lo << -0.5, -5.0;
  hi << 10.0, 5.0;
  CHECK_THROWS_AS(euler_system(1, 1.0, 1.5, lo, hi), std::invalid_argument);
}

TEST_CASE("euler in two space dimensions validates as well") {
  const SystemSpec sys = euler_system(2, 1.0, 1.5);
  CHECK(sys.n == 3);
  const auto states = default_box_states(sys, 1000, 22);
  CHECK(compatibility_residual(sys, states).max_residual <= 1e-8);
  CHECK(gradient_finite_difference_error(sys, states) <= 1e-5);
}

TEST_CASE("p-system energy pair: identity, degenerate point, growth") {
  const SystemSpec sys = psystem_elasticity(0.5);

  // dQ1/dF = -v W''(F) matches B . dG_.1/dF at (v,F) = (2,3)
  const State s = state2(2.0, 3.0);
  Eigen::MatrixXd DQ(2, 2), DG(2, 2);
  Eigen::VectorXd B(2);
  sys.companion_gradient(s, DQ);
  sys.flux_gradient(s, 1, DG);
  sys.multiplier(s, B);
  CHECK(DQ(1, 1) == doctest::Approx(B.dot(DG.col(1))).epsilon(1e-15));

  // W'(0) = W''(0) = 0 for the power energy
  Eigen::MatrixXd G(2, 2);
  sys.flux(state2(1.0, 0.0), G);
  CHECK(G(0, 1) == 0.0);  // -W'(0)
  sys.flux_gradient(state2(1.0, 0.0), 1, DG);
  CHECK(DG(0, 1) == 0.0);  // -W''(0)

  Eigen::VectorXd Q(2);
  sys.companion(state2(0.0, 0.0), Q);
  CHECK(Q[0] == 0.0);
  CHECK(Q[1] == 0.0);

  const auto states = default_box_states(sys, 1000, 23);
  CHECK(compatibility_residual(sys, states).max_residual <= 1e-8);
  CHECK(gradient_finite_difference_error(sys, states) <= 1e-5);

  CHECK_THROWS_AS(psystem_elasticity(0.0), std::invalid_argument);
  CHECK_THROWS_AS(psystem_elasticity(1.0), std::invalid_argument);
}

TEST_CASE("a corrupted companion flux is caught with its gradient magnitude") {
  SystemSpec sys = burgers_system();
  const auto base_dq = sys.companion_gradient;
  // Q perturbed by +0.1*u shifts DQ by 0.1
  sys.companion_gradient = [base_dq](const State& s, Eigen::Ref<Eigen::MatrixXd> DQ) {
    base_dq(s, DQ);
    DQ(0, 0) += 0.1;
  };
  const CompatibilityResult r =
      compatibility_residual(sys, {state1(-1.0), state1(0.5), state1(2.0)});
  CHECK(r.max_residual == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.worst_alpha == 0);
}

TEST_CASE("flux gradient Hoelder estimates: linear, Lipschitz and power-law") {
  // linear flux: constant gradient, zero quotient
  const SystemSpec linear = parse_custom_system(R"({
    "name": "linear", "n": 1, "d": 1, "gamma": 0.5,
    "domain": {"lo": [-100], "hi": [100]},
    "flux": [[[{"coeff": 1.0, "powers": [1]}], [{"coeff": 2.0, "powers": [1]}]]],
    "companion": [[{"coeff": 0.5, "powers": [2]}], [{"coeff": 1.0, "powers": [2]}]],
    "multiplier": [[{"coeff": 1.0, "powers": [1]}]]
  })");
  std::vector<std::pair<State, State>> pairs = {{state1(0.0), state1(1.0)},
                                                {state1(-2.0), state1(3.0)}};
  CHECK(flux_gradient_holder_estimate(linear, pairs, 0.5) == 0.0);

  // Burgers with gamma = 1 on the pair (0,1): |DG(1)-DG(0)|/1 = 1
  CHECK(flux_gradient_holder_estimate(burgers_system(), {{state1(0.0), state1(1.0)}}, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-15));

  // power-law p-system: quotient of |F|^gamma against pairs approaching the
  // degenerate point is exactly 1 at the claimed exponent and blows up at a
  // higher one (closed-form oracle |d^gamma - 0| / d^gamma' )
  const double gamma = 0.5;
  const SystemSpec ps = psystem_elasticity(gamma);
  for (double delta : {1e-1, 1e-3, 1e-6}) {
    const double est =
        flux_gradient_holder_estimate(ps, {{state2(0.0, 0.0), state2(0.0, delta)}}, gamma);
    CHECK(est == doctest::Approx(1.0).epsilon(1e-12));
  }
  const double near = flux_gradient_holder_estimate(
      ps, {{state2(0.0, 0.0), state2(0.0, 1e-6)}}, gamma + 0.2);
  const double far = flux_gradient_holder_estimate(
      ps, {{state2(0.0, 0.0), state2(0.0, 0.5)}}, gamma + 0.2);
  CHECK(near / far >= 10.0);  // delta^-0.2 across the tested span

  CHECK_THROWS_AS(
      flux_gradient_holder_estimate(ps, {{state2(1.0, 1.0), state2(1.0, 1.0)}}, gamma),
      std::invalid_argument);
}

TEST_CASE("weak residual: constants, an exact shock, and a non-solution") {
  const SystemSpec sys = burgers_system();
  const Grid grid = make_grid({256, 256}, {1.0, 1.0}, {false, true});
  Eigen::VectorXd center(2), radius(2);
  center << 0.5, 0.5;
  radius << 0.35, 0.35;
  const TestFunction phi(grid, center, radius);

  const Field c = sample_scalar(grid, [](const Eigen::VectorXd&) { return 2.0; });
  CHECK(weak_residual(sys, c, phi).cwiseAbs().maxCoeff() <= 1e-12);

  // stationary shock: Rankine-Hugoniot holds, so the residual is tiny
  const Grid fine = make_grid({512, 512}, {1.0, 1.0}, {false, true});
  const Field shock = burgers_riemann(fine, 1.0, -1.0, 0.5);
  const TestFunction phi_fine(fine, center, radius);
  CHECK(weak_residual(sys, shock, phi_fine).cwiseAbs().maxCoeff() <= 1e-3);

  // u(x,t) = t is not a weak solution; the residual is -int(phi) by parts
  const Field drift = sample_scalar(grid, [](const Eigen::VectorXd& x) { return x[0]; });
  const double bump_mass =
      oracles::simpson([](double t) { return oracles::bump(t); }, -1.0, 1.0, 4000);
  const double expected = -(radius[0] * bump_mass) * (radius[1] * bump_mass);
  const double got = weak_residual(sys, drift, phi)[0];
  CHECK(oracles::rel_close(got, expected, 1e-3));
  CHECK(std::abs(got) > 1e-3);
}

TEST_CASE("growth check agrees with a direct scan of the box") {
  const SystemSpec sys = euler_system(1, 1.0, 1.5);
  const auto states = default_box_states(sys, 4000, 77);
  const GrowthReport report = growth_check(sys, states, sys.gamma);
  double oracle = 0.0;
  Eigen::VectorXd Q(2);
  for (const State& s : states) {
    sys.companion(s, Q);
    oracle = std::max(oracle, Q.cwiseAbs().maxCoeff() /
                                  (1.0 + std::pow(s.norm(), 2.0 + sys.gamma)));
  }
  CHECK(report.max_ratio == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(report.pass);

  // zero companion flux
  SystemSpec zero = sys;
  zero.companion = [](const State&, Eigen::Ref<Eigen::VectorXd> Q) { Q.setZero(); };
  CHECK(growth_check(zero, states, sys.gamma).max_ratio == 0.0);
}

TEST_CASE("custom systems parse strictly and validate") {
  // Burgers re-expressed as polynomial terms passes the structural checks
  const SystemSpec sys = parse_custom_system(R"({
    "name": "burgers-poly", "n": 1, "d": 1, "gamma": 1.0,
    "domain": {"lo": [-10], "hi": [10]},
    "flux": [[[{"coeff": 1.0, "powers": [1]}], [{"coeff": 0.5, "powers": [2]}]]],
    "companion": [[{"coeff": 0.5, "powers": [2]}], [{"coeff": 0.3333333333333333, "powers": [3]}]],
    "multiplier": [[{"coeff": 1.0, "powers": [1]}]]
  })");
  const auto states = default_box_states(sys, 500, 5);
  CHECK(compatibility_residual(sys, states).max_residual <= 1e-12);
  CHECK(gradient_finite_difference_error(sys, states) <= 1e-5);
  CHECK(sys.state_from_conserved);  // identity time flux was detected

  // a corrupted companion: residual reported with the worst slot
  const SystemSpec bad = parse_custom_system(R"({
    "name": "corrupt", "n": 1, "d": 1, "gamma": 1.0,
    "domain": {"lo": [-10], "hi": [10]},
    "flux": [[[{"coeff": 1.0, "powers": [1]}], [{"coeff": 0.5, "powers": [2]}]]],
    "companion": [[{"coeff": 0.5, "powers": [2]}, {"coeff": 0.1, "powers": [1]}],
                   [{"coeff": 0.3333333333333333, "powers": [3]}]],
    "multiplier": [[{"coeff": 1.0, "powers": [1]}]]
  })");
  const CompatibilityResult r = compatibility_residual(bad, states);
  CHECK(r.max_residual == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(parse_custom_system("{ not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_custom_system(R"({"n":1,"d":1,"flux":[],"companion":[],
    "multiplier":[],"surprise":1})"),
                  std::invalid_argument);
  // powers list must match n; negative powers are rejected
  CHECK_THROWS_AS(parse_custom_system(R"({"n":1,"d":1,
    "flux":[[[{"coeff":1.0,"powers":[1,2]}],[{"coeff":1.0,"powers":[1]}]]],
    "companion":[[],[]],"multiplier":[[]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_custom_system(R"({"n":1,"d":1,
    "flux":[[[{"coeff":1.0,"powers":[-2]}],[{"coeff":1.0,"powers":[1]}]]],
    "companion":[[],[]],"multiplier":[[]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_named_system("warp-drive", 1, 1.5, 1, 0.5), std::invalid_argument);
}
