#ifndef REEBKIT_SCENARIO_HPP
#define REEBKIT_SCENARIO_HPP

#include <map>
#include <string>
#include <vector>

#include "reebkit/asym_op.hpp"
#include "reebkit/ledger_io.hpp"
#include "reebkit/reeb_flow.hpp"

// End-to-end connected-sum verification: runs every numerically checkable
// sub-claim and assembles a deterministic machine-readable report
// (schema "reeb-kit-report/1").

namespace reebkit::scenario {

struct ScenarioConfig {
  double epsilon = 0.5;
  double h = 1e-4;                // RK4 step
  int spectral_resolution = 512;  // N, even, >= 64
  std::map<std::string, double> tolerances;
  std::string ledger_path;

  void validate() const;
};

// Defaults: epsilon 0.5, h 1e-4, N 512, tolerance table of the acceptance
// criteria.
ScenarioConfig default_config(const std::string& ledger_path);
ScenarioConfig config_from_json(const std::string& text);

struct CheckRecord {
  std::string name;
  std::string status;  // "pass" | "fail" | "assumed"
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  std::string detail;

  bool passed() const { return status != "fail"; }
};

struct VerificationReport {
  bool pass = false;  // all records pass (assumed records count as pass)
  std::vector<CheckRecord> records;
  std::string schema = "reeb-kit-report/1";
  ScenarioConfig config;  // provenance echo

  std::string to_json() const;
};

// gamma_0's asymptotic operator in the balanced frame: the constant rescaling
// diag(d, 1/d), d^2 = B/A, conjugates the generator to [[0,-AB],[-AB,0]]
// without changing any winding, so S becomes diag(-AB, AB) and the spectral
// window fits N = 512 for every epsilon in the acceptance range.
asym::TrivializedAsymptoticOperator gamma0_balanced_operator(
    const contact::NeckProfile& profile, int n);

// Every sub-check failure is a failed record, never a thrown exception.
VerificationReport run_connect_sum_verification(const ScenarioConfig& config);

}  // namespace reebkit::scenario

#endif
