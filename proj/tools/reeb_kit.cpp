#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reebkit/asym_op.hpp"
#include "reebkit/ledger_io.hpp"
#include "reebkit/reeb_flow.hpp"
#include "reebkit/scenario.hpp"
#include "reebkit/sp_paths.hpp"

using nlohmann::json;
using namespace reebkit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sp::Mat2 mat2_from_json(const json& j, const std::string& where) {
  if (!(j.is_array() && j.size() == 2 && j[0].is_array() && j[0].size() == 2 &&
        j[1].is_array() && j[1].size() == 2))
    throw std::invalid_argument(where + ": expected a 2x2 matrix [[a,b],[c,d]]");
  sp::Mat2 m;
  m << j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(),
      j[1][1].get<double>();
  return m;
}

// path file: {"type":"samples","samples":[[[..]],...]} uniform grid over [0,1],
// or {"type":"model","generator":[[..]],"steps":n} (constant generator).
sp::SymplecticPath path_from_file(const std::string& file) {
  const json j = json::parse(slurp(file));
  const auto type = j.value("type", std::string("samples"));
  if (type == "samples") {
    sp::SymplecticPath path;
    for (const auto& s : j.at("samples"))
      path.samples.push_back(mat2_from_json(s, file));
    path.validate();
    return path;
  }
  if (type == "model") {
    const sp::Mat2 m = mat2_from_json(j.at("generator"), file);
    const int steps = j.value("steps", 2048);
    return sp::evolve_linear_system([m](double) { return m; }, steps);
  }
  throw std::invalid_argument(file + ": unknown path type " + type);
}

// operator file: {"s":[[s11,s12],[s12,s22]],"n":256} (constant symmetric S)
asym::TrivializedAsymptoticOperator op_from_file(const std::string& file) {
  const json j = json::parse(slurp(file));
  const sp::Mat2 s = mat2_from_json(j.at("s"), file);
  asym::TrivializedAsymptoticOperator op{[s](double) { return s; },
                                         j.value("n", 256)};
  op.validate();
  return op;
}

int emit(const json& out, bool ok, const std::string& human) {
  std::cout << out.dump(2) << "\n";
  std::cerr << human << "\n";
  return ok ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"reeb-kit: Conley-Zehnder indices, Reeb flows and curve ledgers "
               "on the contact connected-sum neck model"};
  app.require_subcommand(1);

  std::string path_file, op_file, ledger_file, config_file, ledger_override;
  double rho = 0.0, theta = 1.5707963267948966, phi = 0.0;
  double duration = 1.0, step = 1e-3, epsilon = 0.5;
  std::vector<double> window{-12.566370614359172, 12.566370614359172};

  auto* cz = app.add_subcommand("cz", "Conley-Zehnder index of a path/operator");
  auto* cz_path = cz->add_subcommand("path", "rotation-method CZ of a path file");
  cz_path->add_option("file", path_file)->required();
  auto* cz_spec = cz->add_subcommand("spectral", "spectral CZ of an operator file");
  cz_spec->add_option("file", op_file)->required();
  cz->require_subcommand(1);

  auto* flow_cmd = app.add_subcommand("flow", "Reeb flow tools");
  auto* trace = flow_cmd->add_subcommand("trace", "integrate X_f from a polar point");
  trace->add_option("--rho", rho);
  trace->add_option("--theta", theta);
  trace->add_option("--phi", phi);
  trace->add_option("--duration", duration);
  trace->add_option("--step", step);
  trace->add_option("--epsilon", epsilon);
  flow_cmd->require_subcommand(1);

  auto* orbit = app.add_subcommand("orbit", "periodic orbit tools");
  auto* analyze = orbit->add_subcommand("analyze", "certify gamma_0 and its CZ");
  analyze->add_option("--epsilon", epsilon);
  orbit->require_subcommand(1);

  auto* spec_cmd = app.add_subcommand("spectrum", "asymptotic-operator spectrum");
  spec_cmd->add_option("--file", op_file)->required();
  spec_cmd->add_option("--window", window)->expected(2);

  auto* ledger_cmd = app.add_subcommand("ledger", "curve ledger tools");
  auto* check = ledger_cmd->add_subcommand("check", "validate a ledger file");
  check->add_option("file", ledger_file)->required();
  ledger_cmd->require_subcommand(1);

  auto* report = app.add_subcommand("report", "verification reports");
  auto* connect = report->add_subcommand("connect-sum",
                                         "full connected-sum verification");
  connect->add_option("--config", config_file);
  connect->add_option("--ledger", ledger_override);
  report->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  if (cz_path->parsed()) {
    const auto path = path_from_file(path_file);
    const int mu = sp::conley_zehnder(path);
    const auto cls = sp::classify_endpoint(path.endpoint());
    return emit({{"cz", mu}, {"classification", sp::endpoint_kind_name(cls.kind)}},
                true, "cz = " + std::to_string(mu));
  }
  if (cz_spec->parsed()) {
    const auto scz = asym::spectral_cz(op_from_file(op_file));
    return emit({{"alpha", scz.alpha}, {"parity", scz.parity}, {"mu", scz.mu}},
                true, "mu = " + std::to_string(scz.mu));
  }
  if (trace->parsed()) {
    const auto profile = contact::neck_profile(epsilon);
    const auto traj = flow::integrate(
        profile, {contact::ChartId::neck_polar, {rho, theta, phi}}, duration,
        step, true);
    return emit({{"h", traj.h},
                 {"chart_switches", traj.chart_switches},
                 {"exited", traj.exited},
                 {"csv", flow::trajectory_csv(traj)}},
                true,
                "traced " + std::to_string(traj.points.size()) + " points, " +
                    std::to_string(traj.chart_switches) + " chart switches");
  }
  if (analyze->parsed()) {
    const auto profile = contact::neck_profile(epsilon);
    const auto rec = flow::equatorial_orbit(profile);
    double a = 0.0, b = 0.0;
    flow::floquet_constants(profile, a, b);
    return emit(
        {{"epsilon", epsilon},
         {"period", rec.period},
         {"cz", rec.cz_index},
         {"classification", sp::endpoint_kind_name(rec.classification.kind)},
         {"floquet_constants", {{"a", a}, {"b", b}}}},
        true, "gamma_0: period " + std::to_string(rec.period) + ", cz " +
                  std::to_string(rec.cz_index));
  }
  if (spec_cmd->parsed()) {
    const auto slices =
        asym::spectrum(op_from_file(op_file), window[0], window[1]);
    std::cout << asym::spectrum_to_json(slices) << "\n";
    std::cerr << slices.size() << " spectrum slices\n";
    return 0;
  }
  if (check->parsed()) {
    const auto result =
        ledger::check_ledger(ledger::ledger_from_json(slurp(ledger_file)));
    std::cout << result.to_json() << "\n";
    std::cerr << (result.pass ? "ledger check: pass" : "ledger check: FAIL") << "\n";
    return result.pass ? 0 : 1;
  }
  if (connect->parsed()) {
    scenario::ScenarioConfig cfg =
        config_file.empty() ? scenario::default_config("")
                            : scenario::config_from_json(slurp(config_file));
    if (!ledger_override.empty()) cfg.ledger_path = ledger_override;
    if (cfg.ledger_path.empty())
      throw std::invalid_argument("no ledger path (use --ledger or the config file)");
    const auto rep = scenario::run_connect_sum_verification(cfg);
    std::cout << rep.to_json() << "\n";
    int failed = 0;
    for (const auto& r : rep.records) failed += r.status == "fail";
    std::cerr << (rep.pass ? "connect-sum verification: pass"
                           : "connect-sum verification: FAIL (" +
                                 std::to_string(failed) + " failed records)")
              << "\n";
    return rep.pass ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}}.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
