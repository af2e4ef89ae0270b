#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "clcons/system.hpp"

namespace clcons {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("custom system: unknown key '" + it.key() + "' in " + where);
    }
  }
}

/// One product term coeff * prod_j factor(u_j). A factor with power 0 is the
/// constant 1; integer powers mean u^p; fractional powers mean |u|^p, or
/// sign(u)|u|^p when flagged signed.
struct Term {
  double coeff = 0.0;
  std::vector<double> powers;
  std::vector<bool> is_signed;
  std::vector<bool> is_integer;
};

double factor_value(double u, double p, bool sgn, bool integer) {
  if (p == 0.0) return 1.0;
  if (sgn) return (u >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(u), p);
  if (integer) {
    double r = 1.0;
    double base = u;
    for (int k = 0; k < static_cast<int>(p); ++k) r *= base;
    return r;
  }
  return std::pow(std::abs(u), p);
}

double factor_derivative(double u, double p, bool sgn, bool integer) {
  if (p == 0.0) return 0.0;
  if (sgn) return p * std::pow(std::abs(u), p - 1.0);
  if (integer) {
    double r = p;
    for (int k = 0; k < static_cast<int>(p) - 1; ++k) r *= u;
    return r;
  }
  return p * (u >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(u), p - 1.0);
}

struct PolyFunc {
  std::vector<Term> terms;
  int n = 0;

  double eval(const State& s) const {
    double acc = 0.0;
    for (const Term& t : terms) {
      double v = t.coeff;
      for (int j = 0; j < n && v != 0.0; ++j) {
        v *= factor_value(s[j], t.powers[j], t.is_signed[j], t.is_integer[j]);
      }
      acc += v;
    }
    return acc;
  }

  double partial(const State& s, int j0) const {
    double acc = 0.0;
    for (const Term& t : terms) {
      double v = t.coeff;
      for (int j = 0; j < n && v != 0.0; ++j) {
        v *= (j == j0) ? factor_derivative(s[j], t.powers[j], t.is_signed[j], t.is_integer[j])
                       : factor_value(s[j], t.powers[j], t.is_signed[j], t.is_integer[j]);
      }
      acc += v;
    }
    return acc;
  }
};

PolyFunc parse_poly(const json& arr, int n, const std::string& where) {
  if (!arr.is_array()) {
    throw std::invalid_argument("custom system: " + where + " must be a term list");
  }
  PolyFunc f;
  f.n = n;
  for (const auto& jt : arr) {
    reject_unknown_keys(jt, {"coeff", "powers", "signed"}, where);
    Term t;
    t.coeff = jt.at("coeff").get<double>();
    const auto powers = jt.at("powers").get<std::vector<double>>();
    if (static_cast<int>(powers.size()) != n) {
      throw std::invalid_argument("custom system: " + where + ": powers list must have n entries");
    }
    std::vector<bool> sgn(n, false);
    if (jt.contains("signed")) {
      sgn = jt.at("signed").get<std::vector<bool>>();
      if (static_cast<int>(sgn.size()) != n) {
        throw std::invalid_argument("custom system: " + where + ": signed list must have n entries");
      }
    }
    t.powers = powers;
    t.is_signed = sgn;
    for (int j = 0; j < n; ++j) {
      const double p = powers[j];
      if (p < 0.0 || !std::isfinite(p)) {
        throw std::invalid_argument("custom system: " + where + ": powers must be >= 0");
      }
      t.is_integer.push_back(!sgn[j] && p == std::floor(p));
    }
    f.terms.push_back(std::move(t));
  }
  return f;
}

}  // namespace

SystemSpec parse_custom_system(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("custom system: invalid JSON: ") + e.what());
  }
  reject_unknown_keys(root,
                      {"name", "n", "d", "gamma", "domain", "flux", "companion", "multiplier",
                       "growth_constant", "wave_speed_bound"},
                      "top level");
  SystemSpec sys;
  sys.name = root.value("name", std::string("custom"));
  sys.n = root.at("n").get<int>();
  sys.d = root.at("d").get<int>();
  if (sys.n < 1 || sys.d < 1) {
    throw std::invalid_argument("custom system: n and d must be >= 1");
  }
  sys.gamma = root.value("gamma", 1.0);
  sys.gamma_effective = sys.gamma;

  sys.domain_lo = State::Constant(sys.n, -std::numeric_limits<double>::infinity());
  sys.domain_hi = State::Constant(sys.n, std::numeric_limits<double>::infinity());
  if (root.contains("domain")) {
    reject_unknown_keys(root["domain"], {"lo", "hi"}, "domain");
    const auto lo = root["domain"].at("lo").get<std::vector<double>>();
    const auto hi = root["domain"].at("hi").get<std::vector<double>>();
    if (static_cast<int>(lo.size()) != sys.n || static_cast<int>(hi.size()) != sys.n) {
      throw std::invalid_argument("custom system: domain lists must have n entries");
    }
    for (int j = 0; j < sys.n; ++j) {
      sys.domain_lo[j] = lo[j];
      sys.domain_hi[j] = hi[j];
    }
  }

  const auto& jflux = root.at("flux");
  if (!jflux.is_array() || static_cast<int>(jflux.size()) != sys.n) {
    throw std::invalid_argument("custom system: flux must be an n-row array");
  }
  auto fluxes = std::make_shared<std::vector<std::vector<PolyFunc>>>();
  for (int i = 0; i < sys.n; ++i) {
    if (static_cast<int>(jflux[i].size()) != sys.d + 1) {
      throw std::invalid_argument("custom system: each flux row needs d+1 entries");
    }
    std::vector<PolyFunc> row;
    for (int a = 0; a <= sys.d; ++a) {
      std::ostringstream os;
      os << "flux[" << i << "][" << a << "]";
      row.push_back(parse_poly(jflux[i][a], sys.n, os.str()));
    }
    fluxes->push_back(std::move(row));
  }
  const auto& jq = root.at("companion");
  if (!jq.is_array() || static_cast<int>(jq.size()) != sys.d + 1) {
    throw std::invalid_argument("custom system: companion needs d+1 entries");
  }
  auto companions = std::make_shared<std::vector<PolyFunc>>();
  for (int a = 0; a <= sys.d; ++a) {
    companions->push_back(parse_poly(jq[a], sys.n, "companion"));
  }
  const auto& jb = root.at("multiplier");
  if (!jb.is_array() || static_cast<int>(jb.size()) != sys.n) {
    throw std::invalid_argument("custom system: multiplier needs n entries");
  }
  auto multipliers = std::make_shared<std::vector<PolyFunc>>();
  for (int i = 0; i < sys.n; ++i) {
    multipliers->push_back(parse_poly(jb[i], sys.n, "multiplier"));
  }

  const int n = sys.n;
  const int d = sys.d;
  sys.flux = [fluxes, n, d](const State& s, Eigen::Ref<Eigen::MatrixXd> G) {
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a <= d; ++a) G(i, a) = (*fluxes)[i][a].eval(s);
    }
  };
  sys.flux_gradient = [fluxes, n](const State& s, int alpha, Eigen::Ref<Eigen::MatrixXd> DG) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) DG(i, j) = (*fluxes)[i][alpha].partial(s, j);
    }
  };
  sys.companion = [companions, d](const State& s, Eigen::Ref<Eigen::VectorXd> Q) {
    for (int a = 0; a <= d; ++a) Q[a] = (*companions)[a].eval(s);
  };
  sys.companion_gradient = [companions, n, d](const State& s, Eigen::Ref<Eigen::MatrixXd> DQ) {
    for (int a = 0; a <= d; ++a) {
      for (int j = 0; j < n; ++j) DQ(a, j) = (*companions)[a].partial(s, j);
    }
  };
  sys.multiplier = [multipliers, n](const State& s, Eigen::Ref<Eigen::VectorXd> B) {
    for (int i = 0; i < n; ++i) B[i] = (*multipliers)[i].eval(s);
  };
  sys.multiplier_gradient = [multipliers, n](const State& s, Eigen::Ref<Eigen::MatrixXd> DB) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) DB(i, j) = (*multipliers)[i].partial(s, j);
    }
  };

  if (root.contains("wave_speed_bound")) {
    auto speed = std::make_shared<PolyFunc>(parse_poly(root["wave_speed_bound"], sys.n,
                                                       "wave_speed_bound"));
    sys.max_wave_speed = [speed](const State& s) { return std::abs(speed->eval(s)); };
  }

  // time flux = identity makes the conserved variables the state itself
  bool identity_time_flux = true;
  {
    Eigen::MatrixXd G(sys.n, sys.d + 1);
    for (const State& s : default_box_states(sys, 16, 1234)) {
      sys.flux(s, G);
      if ((G.col(0) - s).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + s.cwiseAbs().maxCoeff())) {
        identity_time_flux = false;
        break;
      }
    }
  }
  if (identity_time_flux) {
    sys.state_from_conserved = [](const Eigen::VectorXd& w, Eigen::Ref<State> s) { s = w; };
  }

  if (root.contains("growth_constant")) {
    sys.growth_constant = root["growth_constant"].get<double>();
  } else {
    auto states = default_box_states(sys, 20000, 0x9e3779b97f4a7c15ULL);
    Eigen::VectorXd Q(sys.d + 1);
    double worst = 0.0;
    for (const State& s : states) {
      sys.companion(s, Q);
      worst = std::max(worst, Q.cwiseAbs().maxCoeff() /
                                  (1.0 + std::pow(s.norm(), 2.0 + sys.gamma)));
    }
    sys.growth_constant = worst * 1.02;
  }
  return sys;
}

SystemSpec load_custom_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("custom system: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_custom_system(buf.str());
}

SystemSpec make_named_system(const std::string& name, double kappa, double gamma0, int d,
                             double gamma, const std::string& custom_file) {
  if (name == "burgers") return burgers_system();
  if (name == "euler") return euler_system(d, kappa, gamma0);
  if (name == "psystem") return psystem_elasticity(gamma);
  if (name == "custom") {
    if (custom_file.empty()) {
      throw std::invalid_argument("system: custom systems need a definition file");
    }
    return load_custom_system(custom_file);
  }
  throw std::invalid_argument("system: unknown system '" + name + "'");
}

}  // namespace clcons
