#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clcons/field_io.hpp"
#include "clcons/generators.hpp"
#include "clcons/report_io.hpp"
#include "clcons/run_config.hpp"
#include "oracles.hpp"

using namespace clcons;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "clcons_test_io";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const char* bin = std::getenv("CLCONS_BIN");
  REQUIRE(bin != nullptr);
  const int status = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("clf files round-trip bit for bit and validate strictly") {
  const fs::path dir = temp_dir();
  const Grid grid = make_grid({32, 48}, {1.0, 2.0}, {false, true});
  const Field field = weierstrass_field(grid, 0.4, 4, 9, 2);

  const fs::path path = dir / "round.clf";
  write_field_clf(field, path.string(), true);
  const Field back = read_field_clf(path.string());
  CHECK(back.grid() == grid);
  CHECK(back.component_count() == 2);
  CHECK((back.values() - field.values()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(write_field_clf(field, path.string(), false), std::invalid_argument);

  SUBCASE("header validation") {
    std::ofstream bad(dir / "bad.clf", std::ios::binary);
    bad << R"({"format_version":1,"points_per_axis":[4],"extent_per_axis":[1.0],)"
        << R"("periodic_per_axis":[true],"component_count":1,"dtype":"f32le"})" << "\n";
    bad.close();
    CHECK_THROWS_AS(read_field_clf((dir / "bad.clf").string()), std::invalid_argument);

    std::ofstream unknown(dir / "unknown.clf", std::ios::binary);
    unknown << R"({"format_version":1,"points_per_axis":[4],"extent_per_axis":[1.0],)"
            << R"("periodic_per_axis":[true],"component_count":1,"dtype":"f64le","extra":1})"
            << "\n";
    unknown.close();
    CHECK_THROWS_AS(read_field_clf((dir / "unknown.clf").string()), std::invalid_argument);

    std::ofstream trunc(dir / "trunc.clf", std::ios::binary);
    trunc << R"({"format_version":1,"points_per_axis":[4],"extent_per_axis":[1.0],)"
          << R"("periodic_per_axis":[true],"component_count":1,"dtype":"f64le"})" << "\n";
    trunc << "only a few bytes";
    trunc.close();
    CHECK_THROWS_AS(read_field_clf((dir / "trunc.clf").string()), std::invalid_argument);
  }

  SUBCASE("csv round trip for small fields") {
    const fs::path csv = dir / "small.csv";
    write_field_csv(field, csv.string(), true);
    const Field again = read_field_csv(csv.string(), grid, 2);
    CHECK((again.values() - field.values()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("scaling reports serialize with the fixed CSV columns") {
  std::vector<ScalingPoint> pts;
  for (int j = 3; j < 7; ++j) {
    ScalingPoint pt;
    pt.epsilon = std::pow(2.0, -j);
    pt.value = 2.0 * pt.epsilon;
    pt.bound = 3.0 * pt.epsilon;
    pt.ratio = pt.value / pt.bound;
    pt.has_bound = true;
    pts.push_back(pt);
  }
  ScalingReport report = make_scaling_report("commutator_norm", pts);
  const std::string csv = scaling_report_to_csv(report);
  CHECK(csv.substr(0, 26) == "epsilon,value,bound,ratio\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  const auto j = scaling_report_to_json(report);
  CHECK(j["quantity"] == "commutator_norm");
  CHECK(j["fit"]["slope"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j["pairs"].size() == 4);
}

TEST_CASE("run configs parse strictly and honor overrides") {
  nlohmann::json j = nlohmann::json::parse(R"({
    "command": "sweep",
    "seed": 11,
    "system": {"name": "burgers"},
    "grid": {"points": [4096], "extent": [1.0], "periodic": [true]},
    "generator": {"kind": "weierstrass", "s": 0.4, "mode_count": 10},
    "quantities": ["commutator_norm"],
    "exponents": {"q": 1.5}
  })");
  const RunConfig cfg = parse_run_config(j);
  CHECK(cfg.seed == 11);
  CHECK(cfg.generator->mode_count == 10);
  CHECK(cfg.q == 1.5);
  CHECK(cfg.resolved == j);

  nlohmann::json bad = j;
  bad["surprise"] = 1;
  CHECK_THROWS_AS(parse_run_config(bad), std::invalid_argument);
  nlohmann::json bad_nested = j;
  bad_nested["system"]["viscosity"] = 0.1;
  CHECK_THROWS_AS(parse_run_config(bad_nested), std::invalid_argument);

  apply_override(j, "generator.s=0.55");
  apply_override(j, "system.name=psystem");
  const RunConfig after = parse_run_config(j);
  CHECK(after.generator->s == 0.55);
  CHECK(after.system.name == "psystem");
}

TEST_CASE("cli end to end: exit codes, determinism, reports") {
  const fs::path dir = temp_dir();

  SUBCASE("check-system exit codes") {
    CHECK(run_cli("check-system burgers") == 0);
    CHECK(run_cli("check-system euler --gamma0 2.5") == 2);
    CHECK(run_cli("check-system nonsense") == 2);
  }

  SUBCASE("a corrupted custom system can never validate") {
    const fs::path sys_path = dir / "corrupt_system.json";
    std::ofstream(sys_path) << R"({
      "name": "corrupt", "n": 1, "d": 1, "gamma": 1.0,
      "domain": {"lo": [-10], "hi": [10]},
      "flux": [[[{"coeff": 1.0, "powers": [1]}], [{"coeff": 0.5, "powers": [2]}]]],
      "companion": [[{"coeff": 0.5, "powers": [2]}, {"coeff": 0.1, "powers": [1]}],
                    [{"coeff": 0.3333333333333333, "powers": [3]}]],
      "multiplier": [[{"coeff": 1.0, "powers": [1]}]]
    })";
    const fs::path report = dir / "corrupt_report.json";
    CHECK(run_cli("check-system custom --file " + sys_path.string() + " --json " +
                  report.string() + " --force") == 1);
    const auto out = nlohmann::json::parse(slurp(report));
    CHECK_FALSE(out["pass"].get<bool>());
    CHECK(out["compatibility"]["max_residual"].get<double>() > 0.05);
    CHECK(out["compatibility"]["worst_alpha"].get<int>() == 0);
    CHECK(out["compatibility"]["worst_state"].size() == 1);
  }

  SUBCASE("generate is deterministic byte for byte") {
    nlohmann::json cfg;
    cfg["system"] = {{"name", "burgers"}};
    cfg["grid"] = {{"points", {512}}, {"extent", {1.0}}, {"periodic", {true}}};
    cfg["generator"] = {{"kind", "weierstrass"}, {"s", 0.4}, {"mode_count", 8}};
    cfg["seed"] = 7;
    const fs::path cfg_path = dir / "gen.json";
    std::ofstream(cfg_path) << cfg.dump();

    const fs::path a = dir / "a.clf", b = dir / "b.clf";
    fs::remove(a);
    fs::remove(b);
    CHECK(run_cli("generate --config " + cfg_path.string() + " --out " + a.string()) == 0);
    CHECK(run_cli("generate --config " + cfg_path.string() + " --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    // refusing to overwrite without --force
    CHECK(run_cli("generate --config " + cfg_path.string() + " --out " + a.string()) == 2);
    CHECK(run_cli("generate --config " + cfg_path.string() + " --out " + a.string() +
                  " --force") == 0);
  }

  SUBCASE("interacting riemann wrap is a configuration error") {
    nlohmann::json cfg;
    cfg["system"] = {{"name", "burgers"}};
    cfg["grid"] = {{"points", {64, 64}}, {"extent", {0.6, 1.0}}, {"periodic", {false, true}}};
    cfg["generator"] = {{"kind", "burgers_riemann"}, {"u_left", 3.0}, {"u_right", 1.0},
                        {"x0", 0.5}};
    const fs::path cfg_path = dir / "wrap.json";
    std::ofstream(cfg_path) << cfg.dump();
    CHECK(run_cli("generate --config " + cfg_path.string() + " --out " +
                  (dir / "wrap.clf").string() + " --force") == 2);
  }

  SUBCASE("vacuum formation in an fv run exits with the domain code") {
    nlohmann::json cfg;
    cfg["system"] = {{"name", "euler"}, {"gamma0", 1.5}, {"kappa", 1.0}, {"d", 1}};
    cfg["grid"] = {{"points", {128}}, {"extent", {1.0}}, {"periodic", {true}}};
    cfg["generator"] = {{"kind", "fv_solve"},    {"initial", "riemann"},
                        {"left_state", {0.5, -4.0}}, {"right_state", {0.5, 4.0}},
                        {"x0", 0.5},             {"end_time", 0.2},
                        {"cfl", 0.9}};
    const fs::path cfg_path = dir / "vacuum.json";
    std::ofstream(cfg_path) << cfg.dump();
    CHECK(run_cli("generate --config " + cfg_path.string() + " --out " +
                  (dir / "vacuum.clf").string() + " --force") == 3);
  }

  SUBCASE("sweep emits a report embedding the resolved config") {
    nlohmann::json cfg;
    cfg["system"] = {{"name", "burgers"}};
    cfg["grid"] = {{"points", {2048}}, {"extent", {1.0}}, {"periodic", {true}}};
    cfg["generator"] = {{"kind", "weierstrass"}, {"s", 0.4}, {"mode_count", 10}};
    cfg["quantities"] = {"commutator_norm", "vmo_modulus"};
    cfg["exponents"] = {{"q", 1.5}, {"p", 3.0}};
    cfg["epsilon_window"] = {{"min", 1.0 / 128}, {"max", 1.0 / 16}};
    cfg["seed"] = 7;
    cfg["thresholds"] = {{"commutator_norm", {{"min_slope", 0.7}}}};
    const fs::path cfg_path = dir / "sweep.json";
    std::ofstream(cfg_path) << cfg.dump();

    const fs::path report = dir / "sweep_report.json";
    const std::string csv_prefix = (dir / "series").string();
    CHECK(run_cli("sweep --config " + cfg_path.string() + " --json " + report.string() +
                  " --csv-prefix " + csv_prefix + " --force") == 0);

    const auto out = nlohmann::json::parse(slurp(report));
    CHECK(out["pass"].get<bool>());
    CHECK(out["config"]["quantities"].size() == 2);
    CHECK(out["version"].get<std::string>().find("clcons") == 0);
    CHECK(out["reports"].size() == 2);
    CHECK(fs::exists(csv_prefix + std::string("_commutator_norm.csv")));
    const std::string csv = slurp(csv_prefix + std::string("_commutator_norm.csv"));
    CHECK(csv.rfind("epsilon,value,bound,ratio\n", 0) == 0);

    // a threshold that cannot hold makes the run fail with exit 1
    cfg["thresholds"] = {{"commutator_norm", {{"min_slope", 5.0}}}};
    std::ofstream(cfg_path) << cfg.dump();
    CHECK(run_cli("sweep --config " + cfg_path.string()) == 1);
  }

  SUBCASE("a shock sweep reproduces the jump formula against the echoed integral") {
    nlohmann::json cfg;
    cfg["system"] = {{"name", "burgers"}};
    cfg["grid"] = {{"points", {256, 256}}, {"extent", {1.0, 1.0}}, {"periodic", {false, true}}};
    cfg["generator"] = {{"kind", "burgers_riemann"}, {"u_left", 1.0}, {"u_right", -1.0},
                        {"x0", 0.5}};
    cfg["quantities"] = {"companion_weak_residual"};
    cfg["test_function"] = {{"center", {0.5, 0.5}}, {"radius", {0.3, 0.25}}};
    cfg["epsilons"] = {1.0 / 16};
    const fs::path cfg_path = dir / "shock.json";
    std::ofstream(cfg_path) << cfg.dump();
    const fs::path report = dir / "shock_report.json";
    CHECK(run_cli("sweep --config " + cfg_path.string() + " --json " + report.string() +
                  " --force") == 0);
    const auto out = nlohmann::json::parse(slurp(report));
    const double line_integral = out["test_function"]["time_line_integral"].get<double>();
    const double measured = out["reports"][0]["pairs"][0]["value"].get<double>();
    CHECK(oracles::rel_close(measured, 2.0 / 3.0 * line_integral, 0.02));
  }

  SUBCASE("analyze computes a single-epsilon quantity") {
    nlohmann::json cfg;
    cfg["system"] = {{"name", "burgers"}};
    cfg["grid"] = {{"points", {1024}}, {"extent", {1.0}}, {"periodic", {true}}};
    cfg["generator"] = {{"kind", "step"}, {"low", -1.0}, {"high", 1.0}, {"interface", 0.25}};
    cfg["quantities"] = {"vmo_modulus"};
    cfg["exponents"] = {{"p", 3.0}};
    cfg["epsilon"] = 1.0 / 32;
    const fs::path cfg_path = dir / "analyze.json";
    std::ofstream(cfg_path) << cfg.dump();
    const fs::path report = dir / "analyze_report.json";
    CHECK(run_cli("analyze --config " + cfg_path.string() + " --json " + report.string() +
                  " --force") == 0);
    const auto out = nlohmann::json::parse(slurp(report));
    CHECK(out["results"]["vmo_modulus"].get<double>() > 1.0);
    CHECK(run_cli("analyze --config " + cfg_path.string() + " --set quantities=[\"nope\"]") == 2);
  }
}
