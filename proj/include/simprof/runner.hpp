#pragma once

#include <string>
#include <vector>

#include "simprof/core.hpp"
#include "simprof/problem.hpp"

namespace simprof {

/// One verification result as it appears in report.json.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct RunConfig {
  Command command = Command::ProfileScalar;
  std::string problem_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // section.key=value
  unsigned seed = 0;
  bool check_monotonicity = false;
};

/// Exit codes shared by the library entry point and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheck = 4;

/// Execute one run: parse + validate the problem, dispatch the solver or
/// checker, and write report.json (always) plus profile.csv / trajectory.csv
/// into out_dir.  Outputs are byte-identical for identical inputs.
int run(const RunConfig& config);

/// Full-precision CSV round trip for profiles (header: y, U_1.., Q_1..).
void write_profile_csv(const std::string& path, const Profile& profile);
Profile read_profile_csv(const std::string& path, const BoundaryPair& boundary);

}  // namespace simprof
