#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simprof/core.hpp"
#include "simprof/reduction.hpp"

namespace simprof {

enum class Command { ProfileScalar, ProfileVector, Reduce, Lift, Evolve, Verify, Oracle };

/// Maps the hyphenated command-line spelling; throws std::invalid_argument
/// for unknown commands.
Command command_from_string(const std::string& name);
std::string command_to_string(Command command);

/// Typed contents of a problem description file.  Presence flags tell which
/// sections appeared; per-command requirements are enforced separately by
/// validate_for_command.
struct ProblemDescription {
  // [diffusivity]  name = linear | pme(m=..) | degen_I | degen_II | degen_III | gl_phase
  bool has_diffusivity = false;
  std::string diffusivity_name;
  double diffusivity_param = 1.0;

  // [fluxmap]  name = linear (with matrix = rows ';'-separated) or
  //            name = reduced(network-file) with d = diag entries
  bool has_fluxmap = false;
  bool fluxmap_reduced = false;
  MatrixXd fluxmap_matrix;

  // [network] (inline or via reduced(file)): mass-action system + diffusion
  bool has_network = false;
  ReactionNetwork network;
  VectorXd d_diag;

  // optional certification box for reduced maps
  bool has_box = false;
  VectorXd box_lo, box_hi;

  // [boundary]
  bool has_boundary = false;
  VectorXd U_minus, U_plus;
  bool has_c_boundary = false;
  VectorXd C_minus, C_plus;

  // [grid]
  bool has_grid = false;
  double half_width = 0.0;
  int n_points = 0;

  // [solver]
  std::vector<double> eps_schedule;
  double shoot_tol = 1e-9;
  double newton_tol = 1e-10;
  int newton_max_iter = 60;
  double damping = 0.5;
  double initial_noise = 0.0;

  // [evolution]
  bool has_evolution = false;
  double tau_end = 4.0;
  int record_stride = 100;
  double bump_amplitude = 0.2;
  double bump_center = 0.0;
  double bump_width = 2.0;
  double fit_tau_min = 1.0;

  // [verify]
  std::string profile_csv;  // path of a profile to re-ingest
};

struct ParseResult {
  ProblemDescription description;
  std::vector<std::string> errors;  // all validation errors, not just the first
  bool ok() const { return errors.empty(); }
};

/// Parse and validate a problem file.  Overrides have the form
/// "section.key=value" and are applied before typing/validation.
ParseResult parse_problem(const std::string& path,
                          const std::vector<std::string>& overrides = {});

/// Same, from an in-memory document; base_dir resolves relative file
/// references (network files).
ParseResult parse_problem_text(const std::string& text, const std::string& base_dir,
                               const std::vector<std::string>& overrides = {});

/// Command-specific completeness requirements (e.g. profile-scalar needs
/// [diffusivity] and [boundary]); returns the list of missing/conflicting
/// pieces, empty when runnable.
std::vector<std::string> validate_for_command(const ProblemDescription& description,
                                              Command command);

}  // namespace simprof
