#include "reebkit/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reebkit::scenario {

namespace {

using nlohmann::json;

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::map<std::string, double> default_tolerances() {
  return {{"pullback", 1e-9},   {"jacobian_det", 1e-10}, {"reeb_residual", 1e-8},
          {"pole_exact", 1e-12}, {"z_monotone", 1e-12},  {"period", 1e-6},
          {"floquet", 1e-6}};
}

double tol(const ScenarioConfig& cfg, const std::string& name) {
  const auto it = cfg.tolerances.find(name);
  require(it != cfg.tolerances.end(), "config: missing tolerance " + name);
  return it->second;
}

// dZ(X_f) at a neck point, chart-aware (Z = rho*cos(theta))
double z_derivative(const contact::ChartPoint& p, const std::array<double, 3>& v) {
  using contact::ChartId;
  if (p.chart == ChartId::neck_polar)
    return std::cos(p.c[1]) * v[0] - p.c[0] * std::sin(p.c[1]) * v[1];
  const double r2 = p.c[1] * p.c[1] + p.c[2] * p.c[2];
  const double s = std::sqrt(1.0 - r2);
  const double d = s * v[0] - p.c[0] * (p.c[1] * v[1] + p.c[2] * v[2]) / s;
  return p.chart == ChartId::neck_pole_north ? d : -d;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Recorder {
  std::vector<CheckRecord>& records;

  // runs body(rec); any exception turns into a failed record
  template <typename F>
  void check(const std::string& name, double expected, double tolerance, F body) {
    CheckRecord rec;
    rec.name = name;
    rec.expected = expected;
    rec.tolerance = tolerance;
    try {
      body(rec);
      if (rec.status.empty())
        rec.status = std::abs(rec.computed - rec.expected) <= rec.tolerance
                         ? "pass"
                         : "fail";
    } catch (const std::exception& e) {
      rec.status = "fail";
      rec.detail = e.what();
    }
    records.push_back(std::move(rec));
  }

  void assumed(const std::string& name, const std::string& detail) {
    CheckRecord rec;
    rec.name = name;
    rec.status = "assumed";
    rec.detail = detail;
    records.push_back(std::move(rec));
  }
};

}  // namespace

void ScenarioConfig::validate() const {
  require(epsilon > 0.0 && std::isfinite(epsilon), "config: epsilon must be positive");
  require(h > 0.0 && std::isfinite(h), "config: h must be positive");
  require(spectral_resolution >= 64 && spectral_resolution % 2 == 0,
          "config: N must be even and >= 64");
  for (const auto& [name, t] : tolerances)
    require(t > 0.0, "config: tolerance " + name + " must be positive");
  for (const auto& [name, t] : default_tolerances())
    require(tolerances.count(name), "config: missing tolerance " + name);
}

ScenarioConfig default_config(const std::string& ledger_path) {
  ScenarioConfig cfg;
  cfg.tolerances = default_tolerances();
  cfg.ledger_path = ledger_path;
  return cfg;
}

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  require(j.is_object(), "config: top level must be an object");
  ScenarioConfig cfg = default_config(j.value("ledger_path", std::string()));
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.h = j.value("h", cfg.h);
  cfg.spectral_resolution = j.value("spectral_resolution", cfg.spectral_resolution);
  const json tols = j.value("tolerances", json::object());
  for (const auto& [name, t] : tols.items()) cfg.tolerances[name] = t.get<double>();
  cfg.validate();
  return cfg;
}

asym::TrivializedAsymptoticOperator gamma0_balanced_operator(
    const contact::NeckProfile& profile, int n) {
  double a = 0.0, b = 0.0;
  flow::floquet_constants(profile, a, b);
  sp::Mat2 s;
  s << -a * b, 0.0, 0.0, a * b;
  return {[s](double) { return s; }, n};
}

std::string VerificationReport::to_json() const {
  json j;
  j["schema"] = schema;
  j["pass"] = pass;
  j["config"] = {{"epsilon", config.epsilon},
                 {"h", config.h},
                 {"spectral_resolution", config.spectral_resolution},
                 {"ledger_path", config.ledger_path},
                 {"tolerances", config.tolerances}};
  j["records"] = json::array();
  for (const auto& r : records)
    j["records"].push_back({{"name", r.name},
                            {"status", r.status},
                            {"expected", r.expected},
                            {"computed", r.computed},
                            {"tolerance", r.tolerance},
                            {"detail", r.detail}});
  return j.dump(2);
}

VerificationReport run_connect_sum_verification(const ScenarioConfig& config) {
  config.validate();
  VerificationReport report;
  report.config = config;
  Recorder rec{report.records};

  const auto profile = contact::neck_profile(config.epsilon);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto random_polar = [&]() {
    const double sgn = u01(rng) < 0.5 ? -1.0 : 1.0;
    return contact::ChartPoint{
        contact::ChartId::neck_polar,
        {sgn * (0.05 + 1.9 * config.epsilon * u01(rng)),
         0.3 + (kPi - 0.6) * u01(rng), 2.0 * kPi * u01(rng)}};
  };
  auto random_pole = [&](bool north) {
    const double r = 0.8 * std::sqrt(u01(rng)), a = 2.0 * kPi * u01(rng);
    const double sgn = u01(rng) < 0.5 ? -1.0 : 1.0;
    return contact::ChartPoint{north ? contact::ChartId::neck_pole_north
                                     : contact::ChartId::neck_pole_south,
                               {sgn * (0.05 + 1.9 * config.epsilon * u01(rng)),
                                r * std::cos(a), r * std::sin(a)}};
  };

  // pullback Phi_pm^* lambda_pm = rho^2 lambda_1 and the det(DPhi_+) formula
  rec.check("pullback_residual", 0.0, tol(config, "pullback"), [&](CheckRecord& r) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto q = random_polar();
      const int sg = q.c[0] > 0.0 ? 1 : -1;
      const auto im = contact::phi_map(sg, q);
      const auto lam =
          (sg > 0 ? contact::lambda_plus() : contact::lambda_minus()).coeff(im.image);
      const auto l1 = contact::lambda_one_form(q.chart).coeff(q);
      for (int c = 0; c < 3; ++c) {
        double pb = 0.0;
        for (int d = 0; d < 3; ++d) pb += lam[d] * im.jacobian[d][c];
        worst = std::max(worst, std::abs(pb - q.c[0] * q.c[0] * l1[c]));
      }
    }
    r.computed = worst;
  });

  rec.check("jacobian_det", 0.0, tol(config, "jacobian_det"), [&](CheckRecord& r) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      auto q = random_polar();
      q.c[0] = std::abs(q.c[0]);  // the quoted formula is for Phi_+
      const double rho = q.c[0], th = q.c[1];
      const double expect = -std::pow(rho, 4) * std::sin(th) *
                            (1.0 + 2.0 * std::cos(th) * std::cos(th));
      const double det = contact::phi_map(+1, q).jacobian_det;
      worst = std::max(worst, std::abs(det - expect) / std::abs(expect));
    }
    r.computed = worst;
  });

  // defining residuals of X_f and the exact pole values
  rec.check("reeb_residuals", 0.0, tol(config, "reeb_residual"), [&](CheckRecord& r) {
    double worst = 0.0;
    const auto lf_pol = contact::lambda_f_form(profile, contact::ChartId::neck_polar);
    const auto lf_n = contact::lambda_f_form(profile, contact::ChartId::neck_pole_north);
    const auto lf_s = contact::lambda_f_form(profile, contact::ChartId::neck_pole_south);
    for (int i = 0; i < 1000; ++i) {
      const auto q = i % 2 ? random_polar() : random_pole(i % 4 == 0);
      const auto& lf = q.chart == contact::ChartId::neck_polar
                           ? lf_pol
                           : (q.chart == contact::ChartId::neck_pole_north ? lf_n : lf_s);
      const auto x = contact::reeb_field_closed_form(profile, q);
      worst = std::max(worst, std::abs(lf.eval(q, x.v) - 1.0));
      const auto curl = lf.curl(q);
      for (int c = 0; c < 3; ++c) {
        double ix = 0.0;
        for (int d = 0; d < 3; ++d) ix += x.v[d] * curl[d][c];
        worst = std::max(worst, std::abs(ix));
      }
    }
    r.computed = worst;
  });

  rec.check("pole_flow_direction", 0.0, tol(config, "pole_exact"), [&](CheckRecord& r) {
    double worst = 0.0;
    for (int i = -20; i <= 20; ++i) {
      const double rho = 0.095 * config.epsilon * i;
      const auto xn = contact::reeb_field_closed_form(
          profile, {contact::ChartId::neck_pole_north, {rho, 0.0, 0.0}});
      const auto xs = contact::reeb_field_closed_form(
          profile, {contact::ChartId::neck_pole_south, {rho, 0.0, 0.0}});
      const double want = 1.0 / (3.0 * profile.f(rho));
      worst = std::max({worst, std::abs(xn.v[0] - want), std::abs(xn.v[1]),
                        std::abs(xn.v[2]), std::abs(xs.v[0] + want),
                        std::abs(xs.v[1]), std::abs(xs.v[2])});
    }
    r.computed = worst;
  });

  rec.check("z_monotonicity", 0.0, tol(config, "z_monotone"), [&](CheckRecord& r) {
    double most_negative = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto q = i % 2 ? random_polar() : random_pole(i % 4 == 0);
      const auto x = contact::reeb_field_closed_form(profile, q);
      most_negative = std::min(most_negative, z_derivative(q, x.v));
    }
    r.computed = -most_negative;  // violation magnitude
  });

  // gamma_0: period, Floquet closed form, both CZ routes, eigenspace dims
  const double period = profile.f(0.0) * kPi;
  rec.check("gamma0_period", period, tol(config, "period"), [&](CheckRecord& r) {
    r.computed = flow::first_return_time(
        profile, {contact::ChartId::neck_polar, {0.0, 0.5 * kPi, 0.0}}, config.h);
  });

  const int steps = std::max(16, int(std::lround(1.0 / config.h)));
  rec.check("floquet_closed_form", 0.0, tol(config, "floquet"), [&](CheckRecord& r) {
    const auto orbit = flow::equatorial_orbit(profile, steps);
    const sp::Mat2 cf = flow::floquet_closed_form(profile, 1.0);
    r.computed = (orbit.floquet - cf).norm() / cf.norm();
    r.detail = "relative Frobenius error";
  });

  rec.check("path_cz_gamma0", 0.0, 0.0, [&](CheckRecord& r) {
    const auto orbit = flow::equatorial_orbit(profile, steps);
    r.computed = double(orbit.cz_index);
    r.detail = std::string("classification ") +
               sp::endpoint_kind_name(orbit.classification.kind);
  });

  rec.check("spectral_cz_gamma0", 0.0, 0.0, [&](CheckRecord& r) {
    const auto op = gamma0_balanced_operator(profile, config.spectral_resolution);
    const auto cz = asym::spectral_cz(op, op.s_sup() + 2.0 * kPi);
    r.computed = std::abs(cz.alpha) + std::abs(cz.parity) + std::abs(cz.mu);
    r.detail = "(alpha, parity, mu) = (" + std::to_string(cz.alpha) + ", " +
               std::to_string(cz.parity) + ", " + std::to_string(cz.mu) + ")";
  });

  rec.check("extremal_eigenspace_dims", 0.0, 0.0, [&](CheckRecord& r) {
    const auto op = gamma0_balanced_operator(profile, config.spectral_resolution);
    const auto dims = asym::extremal_eigenspace_dims(op, op.s_sup() + 2.0 * kPi);
    r.computed = std::abs(dims.first - 1) + std::abs(dims.second - 1);
    r.detail = "dims (" + std::to_string(dims.first) + ", " +
               std::to_string(dims.second) + ")";
  });

  // ledger reproduction of the surgered foliation
  ledger::Ledger led;
  bool led_ok = false;
  rec.check("ledger_load", 0.0, 0.0, [&](CheckRecord& r) {
    led = ledger::ledger_from_json(slurp(config.ledger_path));
    led_ok = true;
    r.detail = config.ledger_path;
  });

  auto ledger_check = [&](const std::string& name, auto body) {
    rec.check(name, 0.0, 0.0, [&](CheckRecord& r) {
      require(led_ok, "ledger not loaded");
      body(r);
    });
  };

  ledger_check("ledger_index_P", [&](CheckRecord& r) {
    r.computed = std::abs(ledger::fredholm_index(led.curve("P_plus")) - 1) +
                 std::abs(ledger::fredholm_index(led.curve("P_minus")) - 1);
    r.detail = "ind(P+) = ind(P-) = 1";
  });
  ledger_check("ledger_index_Z", [&](CheckRecord& r) {
    r.computed = std::abs(ledger::fredholm_index(led.curve("Z_p")) - 1) +
                 std::abs(ledger::fredholm_index(led.curve("Z_q")) - 1);
    r.detail = "ind(Z_p) = ind(Z_q) = 1";
  });
  ledger_check("ledger_building_additivity", [&](CheckRecord& r) {
    require(!led.buildings.empty(), "ledger has no buildings");
    const auto bc = ledger::building_index_additivity(led.buildings.front());
    r.computed = std::abs(bc.index_sum - 2) + std::abs(bc.arithmetic_genus) +
                 (bc.levels_stable ? 0 : 1);
    r.detail = "2 = ind(Z_p) + ind(P+) + 0";
  });
  ledger_check("ledger_even_punctures_Z", [&](CheckRecord& r) {
    r.computed = std::abs(ledger::count_even_punctures(led.curve("Z_p")) - 1) +
                 std::abs(ledger::count_even_punctures(led.curve("Z_q")) - 1);
    r.detail = "exactly one even puncture each";
  });
  ledger_check("ledger_pairwise_gin", [&](CheckRecord& r) {
    require(!led.foliations.empty(), "ledger has no foliations");
    const auto& fol = led.foliations.front();
    long long worst = 0;
    std::vector<std::string> clauses;
    for (size_t i = 0; i < fol.curves.size(); ++i)
      for (size_t j = i; j < fol.curves.size(); ++j) {
        const auto& a = fol.curves[i];
        const auto& b = fol.curves[j];
        const long long gin = ledger::gen_intersection(
            a, b, ledger::rel_lookup(led.rel, a.name, b.name));
        worst = std::max(worst, std::llabs(gin));
        const auto gz = ledger::gin_zero_conditions(a, b);
        if (!gz.pass)
          for (const auto& f : gz.failures)
            clauses.push_back(a.name + "*" + b.name + ": " + f);
      }
    r.computed = double(worst);
    if (!clauses.empty()) {
      r.status = "fail";
      std::string d;
      for (const auto& c : clauses) d += (d.empty() ? "" : "; ") + c;
      r.detail = d;
    }
  });
  ledger_check("ledger_energy_equality", [&](CheckRecord& r) {
    require(led.foliations.size() >= 2, "ledger needs surgered and original foliations");
    const auto fp = ledger::foliation_stability_check(led.foliations[0], led.rel);
    const auto f = ledger::foliation_stability_check(led.foliations[1], led.rel);
    require(fp.pass && f.pass, "foliation stability failed");
    r.computed = fp.energy == f.energy ? 0.0 : 1.0;
    r.detail = "E(F') = E(F) = " + std::to_string(fp.energy.numerator()) + "/" +
               std::to_string(fp.energy.denominator());
  });

  rec.assumed("nondegeneracy_perturbation",
              "the arbitrarily small perturbation making all orbits outside the "
              "neck nondegenerate is assumed, not computed");
  rec.assumed("pde_existence",
              "existence of the holomorphic planes and the compactness argument "
              "behind the foliation F' are PDE inputs, not desk-checkable");

  report.pass = true;
  for (const auto& r : report.records) report.pass = report.pass && r.passed();
  return report;
}

}  // namespace reebkit::scenario
