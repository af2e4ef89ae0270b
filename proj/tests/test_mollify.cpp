#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "clcons/analysis.hpp"
#include "clcons/field.hpp"
#include "clcons/generators.hpp"
#include "clcons/kernel.hpp"
#include "oracles.hpp"

using namespace clcons;

namespace {

Field random_field(const Grid& grid, int components, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field f(grid, components);
  for (std::int64_t i = 0; i < grid.point_count(); ++i) {
    for (int c = 0; c < components; ++c) {
      f.value(c, i) = 2.0 * oracles::unit_from_bits(rng()) - 1.0;
    }
  }
  return f;
}

std::vector<std::pair<int, double>> taps_1d(const Kernel& kernel) {
  std::vector<std::pair<int, double>> taps;
  for (int t = 0; t < kernel.tap_count(); ++t) {
    taps.emplace_back(kernel.offsets(t, 0), kernel.weights[t]);
  }
  return taps;
}

}  // namespace

TEST_CASE("kernels have unit mass, exact symmetry and support in the eps ball") {
  for (const char* profile : {"bump", "tensor_bump"}) {
    const Grid grid = make_grid({128, 96}, {1.0, 1.5}, {true, true});
    const Kernel kernel = make_kernel(grid, 0.11, profile);
    CAPTURE(profile);

    double mass = kernel.weights.sum() * grid.cell_volume();
    CHECK(std::abs(mass - 1.0) <= 1e-12);
    CHECK(kernel.weights.minCoeff() >= 0.0);

    for (int t = 0; t < kernel.tap_count(); ++t) {
      double len2 = 0.0;
      for (int a = 0; a < 2; ++a) {
        const double x = kernel.offsets(t, a) * grid.spacing(a);
        len2 += x * x;
      }
      CHECK(std::sqrt(len2) <= 0.11 * (1 + 1e-12));
    }

    // weight(-offset) == weight(offset) exactly: the tap list is centrally
    // symmetric, reversal maps a tap to its negation
    const int taps = kernel.tap_count();
    for (int t = 0; t < taps; ++t) {
      CHECK(kernel.offsets.row(t) == -kernel.offsets.row(taps - 1 - t));
      CHECK(kernel.weights[t] == kernel.weights[taps - 1 - t]);
      for (int a = 0; a < 2; ++a) {
        CHECK(kernel.derivative_weights[a][t] == -kernel.derivative_weights[a][taps - 1 - t]);
      }
    }

    // derivative taps sum to zero mass
    for (int a = 0; a < 2; ++a) {
      const double sum = kernel.derivative_weights[a].sum() * grid.cell_volume();
      const double scale = kernel.derivative_weights[a].abs().sum() * grid.cell_volume();
      CHECK(std::abs(sum) <= 1e-12 * std::max(1.0, scale));
    }
  }

  const Grid grid = make_grid({64}, {1.0}, {true});
  CHECK_THROWS_AS(make_kernel(grid, 1.5 / 64, "bump"), std::invalid_argument);  // too small
  CHECK_THROWS_AS(make_kernel(grid, 0.6, "bump"), std::invalid_argument);       // too large
  CHECK_THROWS_AS(make_kernel(grid, 0.1, "nope"), std::invalid_argument);
}

TEST_CASE("mollification preserves constants and interior linear fields") {
  for (const char* profile : {"bump", "tensor_bump"}) {
    CAPTURE(profile);
    const Grid torus = make_grid({256}, {1.0}, {true});
    const InteriorRegion full(torus, {0.0});
    const Kernel kernel = make_kernel(torus, 1.0 / 16, profile);

    const Field c = sample_scalar(torus, [](const Eigen::VectorXd&) { return 4.25; });
    const Field mc = mollify(c, kernel, full);
    CHECK(field_max_abs(field_difference(mc, c), full.box()) <= 1e-12 * 4.25);

    const Grid line = make_grid({256}, {1.0}, {false});
    const InteriorRegion interior(line, {0.1});
    const Kernel lk = make_kernel(line, 1.0 / 16, profile);
    const Field lin = sample_scalar(line, [](const Eigen::VectorXd& x) { return x[0]; });
    const Field ml = mollify(lin, lk, interior);
    CHECK(field_max_abs(field_difference(ml, lin), interior.box()) <= 1e-12);
  }
}

TEST_CASE("sine modes attenuate by exactly the kernel symbol") {
  const Grid grid = make_grid({1024}, {1.0}, {true});
  const InteriorRegion full(grid, {0.0});
  const Field wave = sample_scalar(grid, [](const Eigen::VectorXd& x) {
    return std::sin(oracles::kTwoPi * x[0]);
  });
  for (const char* profile : {"bump", "tensor_bump"}) {
    CAPTURE(profile);
    const Kernel kernel = make_kernel(grid, 1.0 / 16, profile);
    const double m = oracles::kernel_symbol_1d(taps_1d(kernel), grid.spacing(0),
                                               grid.cell_volume(), 1.0, 1);
    CHECK(m > 0.0);
    CHECK(m < 1.0);
    const Field smoothed = mollify(wave, kernel, full);
    double worst = 0.0;
    for (std::int64_t i = 0; i < grid.point_count(); ++i) {
      worst = std::max(worst, std::abs(smoothed.value(0, i) - m * wave.value(0, i)));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("mollified derivatives: constants, sine modes, exact reflection") {
  const Grid grid = make_grid({1024}, {1.0}, {true});
  const InteriorRegion full(grid, {0.0});
  const Kernel kernel = make_kernel(grid, 1.0 / 16, "tensor_bump");

  const Field c = sample_scalar(grid, [](const Eigen::VectorXd&) { return 7.0; });
  CHECK(field_max_abs(mollified_derivative(c, kernel, 0, full), full.box()) <= 1e-12);

  const Field wave = sample_scalar(grid, [](const Eigen::VectorXd& x) {
    return std::sin(oracles::kTwoPi * x[0]);
  });
  const double m = oracles::kernel_symbol_1d(taps_1d(kernel), grid.spacing(0),
                                             grid.cell_volume(), 1.0, 1);
  const Field dwave = mollified_derivative(wave, kernel, 0, full);
  double worst = 0.0;
  for (std::int64_t i = 0; i < grid.point_count(); ++i) {
    const double expect = oracles::kTwoPi * m * std::cos(oracles::kTwoPi * grid.coordinate(0, i));
    worst = std::max(worst, std::abs(dwave.value(0, i) - expect));
  }
  CHECK(worst / (oracles::kTwoPi * m) <= 1e-3);

  // derivative of the reflected field equals minus the reflected derivative,
  // exactly: paired tap summation keeps the identity bitwise
  const Field f = random_field(grid, 1, 99);
  Field reflected(grid, 1);
  const int n = grid.points(0);
  for (int i = 0; i < n; ++i) reflected.value(0, i) = f.value(0, (n - i) % n);
  const Field df = mollified_derivative(f, kernel, 0, full);
  const Field dref = mollified_derivative(reflected, kernel, 0, full);
  for (int i = 0; i < n; ++i) {
    CHECK(dref.value(0, i) == -df.value(0, (n - i) % n));
  }
}

TEST_CASE("mollification is linear and Young-bounded") {
  const Grid grid = make_grid({96, 64}, {1.0, 1.0}, {true, true});
  const InteriorRegion full(grid, {0.0, 0.0});
  const Kernel kernel = make_kernel(grid, 0.07, "tensor_bump");
  const Field f = random_field(grid, 2, 5);
  const Field g = random_field(grid, 2, 6);

  Field combo(grid, 2);
  combo.values() = 2.5 * f.values() - 1.25 * g.values();
  const Field lhs = mollify(combo, kernel, full);
  const Field mf = mollify(f, kernel, full);
  const Field mg = mollify(g, kernel, full);
  Field rhs(grid, 2);
  rhs.values() = 2.5 * mf.values() - 1.25 * mg.values();
  CHECK(field_max_abs(field_difference(lhs, rhs), full.box()) <= 1e-12);

  for (double p : {1.0, 2.0, 3.0}) {
    CHECK(field_norm_p(mf, p, full) <= (1.0 + 1e-10) * field_norm_p(f, p, full));
  }
}

TEST_CASE("separable fast path matches the direct-sum reference") {
  const Grid grid = make_grid({48, 40}, {1.0, 1.3}, {true, false});
  const InteriorRegion region(grid, {0.0, 0.2});
  const Kernel kernel = make_kernel(grid, 0.15, "tensor_bump");
  REQUIRE(kernel.separable);
  const Field f = random_field(grid, 2, 17);

  const Field fast = mollify(f, kernel, region);
  const Field slow = mollify_direct(f, kernel, region.box());
  CHECK(field_max_abs(field_difference(fast, slow), region.box()) <= 1e-12);

  for (int axis = 0; axis < 2; ++axis) {
    const Field dfast = mollified_derivative(f, kernel, axis, region);
    const Field dslow = mollified_derivative_direct(f, kernel, axis, region.box());
    CHECK(field_max_abs(field_difference(dfast, dslow), region.box()) <= 1e-12 / grid.spacing(axis));
  }
}

TEST_CASE("mollification error scales like eps^s on a Weierstrass field") {
  const Grid grid = make_grid({4096}, {1.0}, {true});
  const InteriorRegion full(grid, {0.0});
  const double s = 0.4;
  const Field f = weierstrass_field(grid, s, 11, 7);
  std::vector<std::pair<double, double>> pairs;
  for (double eps : dyadic_epsilons(grid, std::pow(2.0, -8), std::pow(2.0, -4))) {
    const Kernel kernel = make_kernel(grid, eps, "tensor_bump");
    const Field diff = field_difference(mollify(f, kernel, full), f);
    pairs.emplace_back(eps, field_norm_p(diff, 3.0, full));
  }
  const FitResult fit = fit_loglog_exponent(pairs);
  CHECK(fit.slope >= s - 0.1);
}
