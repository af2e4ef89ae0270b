#include "clcons/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "clcons/analysis.hpp"
#include "clcons/field_io.hpp"
#include "clcons/generators.hpp"
#include "clcons/parallel.hpp"
#include "clcons/report_io.hpp"

namespace clcons {

namespace {

using nlohmann::json;

json base_report(const RunConfig& config, const Grid* grid) {
  json j;
  j["version"] = kVersion;
  j["config"] = config.resolved;
  if (grid) {
    j["grid"] = {{"points", grid->points_per_axis()},
                 {"extent", grid->extent_per_axis()},
                 {"periodic", grid->periodic_per_axis()}};
  }
  return j;
}

void emit_json(const RunConfig& config, const json& j) {
  if (!config.output.json.empty()) {
    write_text_file(config.output.json, j.dump(2) + "\n", config.force);
  }
}

Field generate_field(const RunConfig& config, const GeneratorConfig& gen) {
  if (gen.kind == "fv_solve") {
    const SystemSpec system = config.build_system();
    if (!config.grid) throw std::invalid_argument("generator: fv_solve needs a spatial grid");
    const Grid sgrid = config.grid->build();
    Field initial = [&]() -> Field {
      if (gen.initial == "file") {
        if (gen.initial_path.empty()) {
          throw std::invalid_argument("generator: fv initial=file needs initial_path");
        }
        return read_field_clf(gen.initial_path);
      }
      if (gen.initial == "riemann" || gen.initial.empty()) {
        std::vector<double> left = gen.left_state, right = gen.right_state;
        if (left.empty()) left = {gen.u_left};
        if (right.empty()) right = {gen.u_right};
        if (static_cast<int>(left.size()) != system.n ||
            static_cast<int>(right.size()) != system.n) {
          throw std::invalid_argument("generator: riemann states must have n components");
        }
        Field f(sgrid, system.n);
        const double L = sgrid.extent(0);
        std::int64_t flat = 0;
        for_each_index(sgrid.full_box(), [&](std::span<const int> idx) {
          double a = std::fmod(sgrid.coordinate(0, idx[0]) - gen.x0, L);
          if (a < 0) a += L;
          const auto& side = (a < 0.5 * L) ? right : left;
          for (int c = 0; c < system.n; ++c) f.value(c, flat) = side[c];
          ++flat;
        });
        return f;
      }
      throw std::invalid_argument("generator: unknown fv initial '" + gen.initial + "'");
    }();
    return fv_solve(system, initial, gen.end_time, gen.cfl).spacetime;
  }

  if (!config.grid) throw std::invalid_argument("generator: a grid section is required");
  const Grid grid = config.grid->build();
  if (gen.kind == "weierstrass") {
    return weierstrass_field(grid, gen.s, gen.mode_count, config.seed, gen.component_count);
  }
  if (gen.kind == "smooth_modes") {
    return smooth_modes_field(grid, gen.mode_count, config.seed, gen.component_count);
  }
  if (gen.kind == "step") {
    return step_field(grid, gen.low, gen.high, gen.interface_position);
  }
  if (gen.kind == "burgers_riemann") {
    return burgers_riemann(grid, gen.u_left, gen.u_right, gen.x0);
  }
  if (gen.kind == "burgers_smooth") {
    return burgers_smooth(grid, gen.amplitude);
  }
  throw std::invalid_argument("generator: unknown kind '" + gen.kind + "'");
}

Field load_input_field(const RunConfig& config) {
  const bool has_file = !config.field_in.empty();
  const bool has_gen = config.generator.has_value();
  if (has_file == has_gen) {
    throw std::invalid_argument("exactly one of field_in or generator must be given");
  }
  return has_file ? read_field_clf(config.field_in) : generate_field(config, *config.generator);
}

InteriorRegion make_region(const RunConfig& config, const Grid& grid, double max_epsilon) {
  std::vector<double> margins = config.region_margins;
  if (margins.empty()) {
    // default: the largest mollification radius of the run on bounded axes
    margins.assign(grid.dim_count(), 0.0);
    for (int k = 0; k < grid.dim_count(); ++k) {
      if (!grid.periodic(k)) margins[k] = max_epsilon;
    }
  }
  return InteriorRegion(grid, margins);
}

TestFunction make_test_function(const RunConfig& config, const Grid& grid) {
  if (!config.test_function) {
    throw std::invalid_argument("this quantity needs a test_function section");
  }
  const auto& tf = *config.test_function;
  return TestFunction(grid,
                      Eigen::Map<const Eigen::VectorXd>(tf.center.data(), tf.center.size()),
                      Eigen::Map<const Eigen::VectorXd>(tf.radius.data(), tf.radius.size()));
}

/// Wrap-contamination guard for Riemann-generated fields.
void check_wrap_clearance(const RunConfig& config, const TestFunction& phi, double max_epsilon) {
  if (!config.generator) return;
  const auto& gen = *config.generator;
  const Grid& grid = phi.grid();
  if (gen.kind == "burgers_riemann") {
    const WrapBand band = riemann_wrap_band(grid, gen.u_left, gen.u_right, gen.x0, false);
    require_clear_of_wrap(phi, band, max_epsilon + 4.0 * grid.spacing(1));
  } else if (gen.kind == "fv_solve" && (gen.initial == "riemann" || gen.initial.empty())) {
    const SystemSpec system = config.build_system();
    std::vector<double> left = gen.left_state, right = gen.right_state;
    if (left.empty()) left = {gen.u_left};
    if (right.empty()) right = {gen.u_right};
    const double sl = system.max_wave_speed(
        Eigen::Map<const Eigen::VectorXd>(left.data(), left.size()));
    const double sr = system.max_wave_speed(
        Eigen::Map<const Eigen::VectorXd>(right.data(), right.size()));
    WrapBand band;
    const double L = grid.extent(1);
    band.center = std::fmod(gen.x0 + 0.5 * L, L);
    band.halfwidth = 1.2 * std::max(sl, sr) * grid.extent(0);
    require_clear_of_wrap(phi, band, max_epsilon + 4.0 * grid.spacing(1));
  }
}

/// Time-line integral of phi along its spatial center, int phi(c_x, t) dt,
/// echoed in reports so shock measurements compare directly against the
/// jump-formula rate. Defined for space-time grids (axis 0 bounded).
double phi_time_line_integral(const TestFunction& phi) {
  const Grid& grid = phi.grid();
  if (grid.dim_count() < 2 || grid.periodic(0)) return 0.0;
  double acc = 0.0;
  const int n = 20000;
  const double r = phi.radius()[0];
  const double c = phi.center()[0];
  for (int i = 0; i <= n; ++i) {
    const double t = (c - r) + 2.0 * r * i / n;
    const double u = (t - c) / r;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    if (u * u < 1.0) acc += w * std::exp(-1.0 / (1.0 - u * u));
  }
  acc *= 2.0 * r / n;
  double spatial = 1.0;
  for (int k = 1; k < grid.dim_count(); ++k) spatial *= std::exp(-1.0);  // bump(0)
  return acc * spatial;
}

double exponent_p(const RunConfig& config, const SystemSpec& system) {
  return config.p > 0.0 ? config.p : system.gamma + 2.0;
}

double exponent_q(const RunConfig& config, const SystemSpec& system) {
  return config.q > 0.0 ? config.q : (system.gamma + 2.0) / (system.gamma + 1.0);
}

std::vector<double> sweep_epsilons(const RunConfig& config, const Grid& grid) {
  if (!config.epsilons.empty()) {
    std::vector<double> snapped;
    for (double e : config.epsilons) snapped.push_back(snap_epsilon(grid, e));
    std::sort(snapped.begin(), snapped.end(), std::greater<>());
    snapped.erase(std::unique(snapped.begin(), snapped.end()), snapped.end());
    return snapped;
  }
  if (config.epsilon_window) {
    return dyadic_epsilons(grid, config.epsilon_window->first, config.epsilon_window->second);
  }
  return default_epsilon_window(grid);
}

bool apply_thresholds(const RunConfig& config, ScalingReport& report) {
  bool ok = report.pass;
  auto it = config.thresholds.find(report.quantity_name);
  if (it != config.thresholds.end()) {
    const ThresholdConfig& t = it->second;
    if (t.min_slope && (!report.fit.valid || report.fit.slope < *t.min_slope)) ok = false;
    if (t.max_slope && (!report.fit.valid || report.fit.slope > *t.max_slope)) ok = false;
    if (t.min_ratio_slope &&
        (!report.ratio_fit.valid || report.ratio_fit.slope < *t.min_ratio_slope)) {
      ok = false;
    }
    if (t.max_value) {
      for (const auto& pt : report.pairs) {
        if (pt.value > *t.max_value) ok = false;
      }
    }
  }
  report.pass = ok;
  return ok;
}

}  // namespace

int cmd_check_system(const RunConfig& config) {
  const SystemSpec system = config.build_system();
  const auto states = default_box_states(system, config.states, config.seed);

  const CompatibilityResult compat = compatibility_residual(system, states);
  const double fd_error = gradient_finite_difference_error(system, states);
  const GrowthReport growth = growth_check(system, states, system.gamma);

  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i + 1 < states.size(); i += 2) {
    if ((states[i] - states[i + 1]).norm() > 0.0) pairs.emplace_back(states[i], states[i + 1]);
  }
  const double holder = flux_gradient_holder_estimate(system, pairs, system.gamma);

  const bool compat_ok = compat.max_residual <= config.compatibility_threshold;
  const bool fd_ok = fd_error <= config.fd_threshold;
  const bool pass = compat_ok && fd_ok && growth.pass && std::isfinite(holder);

  json j = base_report(config, nullptr);
  j["system"] = system.name;
  j["gamma"] = system.gamma;
  j["gamma_effective"] = system.gamma_effective;
  j["compatibility"] = {{"max_residual", compat.max_residual},
                        {"threshold", config.compatibility_threshold},
                        {"worst_j", compat.worst_j},
                        {"worst_alpha", compat.worst_alpha},
                        {"pass", compat_ok}};
  if (compat.worst_state.size() > 0) {
    j["compatibility"]["worst_state"] =
        std::vector<double>(compat.worst_state.data(),
                            compat.worst_state.data() + compat.worst_state.size());
  }
  j["gradient_fd"] = {{"max_relative_error", fd_error},
                      {"threshold", config.fd_threshold},
                      {"pass", fd_ok}};
  j["growth"] = {{"max_ratio", growth.max_ratio},
                 {"constant", system.growth_constant},
                 {"pass", growth.pass}};
  j["holder_estimate"] = holder;
  j["pass"] = pass;
  emit_json(config, j);

  std::cout << "check-system " << system.name << ": compatibility " << compat.max_residual
            << (compat_ok ? " (ok)" : " (FAIL)") << ", fd " << fd_error
            << (fd_ok ? " (ok)" : " (FAIL)") << ", growth ratio " << growth.max_ratio
            << (growth.pass ? " (ok)" : " (FAIL)") << ", holder " << holder << "\n";
  return pass ? kExitPass : kExitThreshold;
}

int cmd_generate(const RunConfig& config) {
  if (!config.generator) throw std::invalid_argument("generate: a generator section is required");
  if (config.field_out.empty()) throw std::invalid_argument("generate: field_out is required");
  const Field field = generate_field(config, *config.generator);
  write_field_clf(field, config.field_out, config.force);
  json j = base_report(config, &field.grid());
  j["field_out"] = config.field_out;
  j["component_count"] = field.component_count();
  emit_json(config, j);
  std::cout << "generate: wrote " << config.field_out << " (" << field.grid().point_count()
            << " points, " << field.component_count() << " components)\n";
  return kExitPass;
}

namespace {

/// Computes one (epsilon, value) series for a named quantity.
ScalingReport sweep_quantity(const RunConfig& config, const std::string& quantity,
                             const SystemSpec& system, const Field& field,
                             const InteriorRegion& region, const std::vector<double>& epsilons) {
  const Grid& grid = field.grid();
  const double p = exponent_p(config, system);
  const double q = exponent_q(config, system);

  if (quantity == "gradient_norm") {
    ScalingReport r = gradient_scaling(field, p, config.kernel_profile, epsilons, region);
    return r;
  }
  if (quantity == "commutator_norm") {
    return commutator_scaling(system, field, q, config.kernel_profile, epsilons, region);
  }
  if (quantity == "vmo_modulus") {
    std::vector<ScalingPoint> pts(epsilons.size());
    parallel_for(static_cast<std::int64_t>(epsilons.size()),
                 [&](std::int64_t b, std::int64_t e) {
                   for (std::int64_t i = b; i < e; ++i) {
                     pts[i].epsilon = epsilons[i];
                     pts[i].value = vmo_modulus(field, p, epsilons[i], region);
                   }
                 },
                 config.jobs);
    ScalingReport r = make_scaling_report("vmo_modulus", std::move(pts));
    r.p = p;
    r.region_description = region.describe();
    return r;
  }
  if (quantity == "mollify_error") {
    std::vector<ScalingPoint> pts(epsilons.size());
    parallel_for(static_cast<std::int64_t>(epsilons.size()),
                 [&](std::int64_t b, std::int64_t e) {
                   for (std::int64_t i = b; i < e; ++i) {
                     const Kernel kernel = make_kernel(grid, epsilons[i], config.kernel_profile);
                     const Field smooth = mollify(field, kernel, region);
                     const Field diff = field_difference(smooth, field);
                     pts[i].epsilon = epsilons[i];
                     pts[i].value = field_norm_p(diff, p, region);
                   }
                 },
                 config.jobs);
    ScalingReport r = make_scaling_report("mollify_error", std::move(pts));
    r.p = p;
    r.kernel_profile = config.kernel_profile;
    r.region_description = region.describe();
    return r;
  }
  if (quantity == "companion_residual") {
    const TestFunction phi = make_test_function(config, grid);
    check_wrap_clearance(config, phi, epsilons.front());
    std::vector<ScalingPoint> pts(epsilons.size());
    parallel_for(static_cast<std::int64_t>(epsilons.size()),
                 [&](std::int64_t b, std::int64_t e) {
                   for (std::int64_t i = b; i < e; ++i) {
                     const Kernel kernel = make_kernel(grid, epsilons[i], config.kernel_profile);
                     pts[i].epsilon = epsilons[i];
                     pts[i].value =
                         std::abs(companion_residual_mollified(system, field, kernel, phi));
                   }
                 },
                 config.jobs);
    ScalingReport r = make_scaling_report("companion_residual", std::move(pts));
    r.gamma = system.gamma;
    r.kernel_profile = config.kernel_profile;
    r.region_description = region.describe();
    return r;
  }
  if (quantity == "besov_seminorm") {
    const double s = config.s_exponent;
    if (!(s > 0.0 && s < 1.0)) {
      throw std::invalid_argument("besov_seminorm needs exponents.s in (0,1)");
    }
    std::vector<ScalingPoint> pts(epsilons.size());
    parallel_for(static_cast<std::int64_t>(epsilons.size()),
                 [&](std::int64_t b, std::int64_t e) {
                   for (std::int64_t i = b; i < e; ++i) {
                     pts[i].epsilon = epsilons[i];
                     pts[i].value = besov_seminorm(field, p, s, region, epsilons[i]).seminorm;
                   }
                 },
                 config.jobs);
    ScalingReport r = make_scaling_report("besov_seminorm", std::move(pts));
    r.p = p;
    r.s = s;
    r.note = "value at epsilon = seminorm restricted to shifts of length <= epsilon";
    r.region_description = region.describe();
    return r;
  }
  if (quantity == "weak_residual" || quantity == "companion_weak_residual") {
    const TestFunction phi = make_test_function(config, grid);
    check_wrap_clearance(config, phi, epsilons.front());
    double value;
    if (quantity == "weak_residual") {
      value = weak_residual(system, field, phi).cwiseAbs().maxCoeff();
    } else {
      value = companion_weak_residual(system, field, phi);
    }
    std::vector<ScalingPoint> pts;
    for (double eps : epsilons) {
      ScalingPoint pt;
      pt.epsilon = eps;
      pt.value = value;
      pts.push_back(pt);
    }
    ScalingReport r = make_scaling_report(quantity, std::move(pts));
    r.note = "epsilon-independent quantity; repeated across the sweep";
    r.region_description = region.describe();
    return r;
  }
  throw std::invalid_argument("sweep: unknown quantity '" + quantity + "'");
}

}  // namespace

int cmd_analyze(const RunConfig& config) {
  const SystemSpec system = config.build_system();
  const Field field = load_input_field(config);
  const Grid& grid = field.grid();
  if (field.component_count() != system.n) {
    throw std::invalid_argument("analyze: field/system component mismatch");
  }
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("analyze: epsilon is required");
  const double eps = snap_epsilon(grid, config.epsilon);
  const InteriorRegion region = make_region(config, grid, eps);
  if (config.quantities.empty()) {
    throw std::invalid_argument("analyze: a quantities list is required");
  }
  json j = base_report(config, &grid);
  j["epsilon"] = eps;
  if (config.test_function) {
    const TestFunction phi = make_test_function(config, grid);
    j["test_function"] = {{"center", config.test_function->center},
                          {"radius", config.test_function->radius},
                          {"time_line_integral", phi_time_line_integral(phi)}};
  }
  json results;
  for (const std::string& quantity : config.quantities) {
    ScalingReport r = sweep_quantity(config, quantity, system, field, region, {eps});
    results[quantity] = r.pairs.empty() ? 0.0 : r.pairs.front().value;
  }
  j["results"] = results;
  emit_json(config, j);
  std::cout << j["results"].dump(2) << "\n";
  return kExitPass;
}

int cmd_sweep(const RunConfig& config) {
  const SystemSpec system = config.build_system();
  const Field field = load_input_field(config);
  const Grid& grid = field.grid();
  if (field.component_count() != system.n) {
    throw std::invalid_argument("sweep: field/system component mismatch");
  }
  const std::vector<double> epsilons = sweep_epsilons(config, grid);
  const InteriorRegion region = make_region(config, grid, epsilons.front());
  if (config.quantities.empty()) throw std::invalid_argument("sweep: a quantities list is required");

  json j = base_report(config, &grid);
  j["epsilons"] = epsilons;
  if (config.test_function) {
    const TestFunction phi = make_test_function(config, grid);
    j["test_function"] = {{"center", config.test_function->center},
                          {"radius", config.test_function->radius},
                          {"time_line_integral", phi_time_line_integral(phi)}};
  }
  json reports = json::array();
  bool all_pass = true;
  for (const std::string& quantity : config.quantities) {
    ScalingReport report = sweep_quantity(config, quantity, system, field, region, epsilons);
    const bool ok = apply_thresholds(config, report);
    all_pass = all_pass && ok;
    reports.push_back(scaling_report_to_json(report));
    if (!config.output.csv_prefix.empty()) {
      write_text_file(config.output.csv_prefix + "_" + report.quantity_name + ".csv",
                      scaling_report_to_csv(report), config.force);
    }
    std::cout << "sweep " << report.quantity_name << ": ";
    if (report.degenerate) {
      std::cout << "degenerate (identically zero)";
    } else if (report.fit.valid) {
      std::cout << "slope " << report.fit.slope;
      if (report.ratio_fit.valid) std::cout << ", ratio slope " << report.ratio_fit.slope;
    } else {
      std::cout << "no fit";
    }
    std::cout << (ok ? " (ok)" : " (FAIL)") << "\n";
  }
  j["reports"] = reports;
  j["pass"] = all_pass;
  emit_json(config, j);
  return all_pass ? kExitPass : kExitThreshold;
}

int run_command(const RunConfig& config) {
  if (config.jobs > 0) set_default_jobs(config.jobs);
  if (config.command == "check-system") return cmd_check_system(config);
  if (config.command == "generate") return cmd_generate(config);
  if (config.command == "analyze") return cmd_analyze(config);
  if (config.command == "sweep") return cmd_sweep(config);
  throw std::invalid_argument("unknown command '" + config.command + "'");
}

}  // namespace clcons
