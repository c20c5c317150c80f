#pragma once

#include "simprof/core.hpp"

#include <optional>
#include <string>
#include <utility>

namespace simprof {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

struct ScalarSolveConfig {
  Grid grid;
  std::vector<double> eps_schedule = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  double shoot_tol = 1e-9;
  int ode_substeps = 8;
  int max_bisect_iter = 80;
};

struct ScalarReport {
  double U0 = 0.0;
  double Q0 = 0.0;
  double y_minus_star = -std::numeric_limits<double>::infinity();
  double y_plus_star = std::numeric_limits<double>::infinity();
  bool support_quadrature_ok = true;
  bool gaussian_bound_ok = false;
  double gaussian_worst_ratio = 0.0;
  Interval u0_bracket;
  Interval q0_bracket;
  double boundary_mismatch = 0.0;
  std::vector<int> singular_nodes;  // D(U) < 1e-8 with positive flux
};

/// Corollary-style brackets:
///   U(0) in [(U_- + g U_+)/(1+g), (g U_- + U_+)/(1+g)] with g = sqrt(D_*/(2 D^*)),
///   Q(0) in [sqrt(D_*/16), sqrt(D^*/8)] * (U_+ - U_-).
std::pair<Interval, Interval> q0_u0_brackets(double D_star, double D_sup, double U_minus,
                                             double U_plus);

/// Solve (D(U) U')' + (y/2) U' = 0 with U(+-inf) = U_-/U_+ (requires
/// U_- <= U_+) by nested-bisection shooting on the first-order (U, Q) system,
/// with epsilon-regularization D + eps for degenerate diffusivities.
std::pair<Profile, ScalarReport> solve_scalar(const ScalarDiffusivity& D, double U_minus,
                                              double U_plus, const ScalarSolveConfig& config);

struct GaussianBoundReport {
  double worst_ratio = 0.0;  // should be <= 1 + discretization slack
  bool ok = false;
};

/// Check the pointwise decay estimates
///   U_+ - U(y) <= (U_+ - U(z)) exp(-(y^2 - z^2)/(4 D^*))  for 0 <= z <= y,
/// the mirrored bound on y <= z <= 0, and the same envelope for Q on both
/// half-lines, over all grid pairs.
GaussianBoundReport verify_gaussian_bounds(const Profile& profile, double D_sup,
                                           double slack = 1.02);

struct SupportEndpoints {
  double y_minus = -std::numeric_limits<double>::infinity();
  double y_plus = std::numeric_limits<double>::infinity();
  bool quadrature_ok = true;
};

/// Free-boundary bounds: y_+^* = ((U_+ - U0)/Q0) * int_{U0}^{U_+} D(u)/(U_+ - u) du
/// when the integral converges (else +inf), and the mirrored y_-^*.
SupportEndpoints support_endpoints(const ScalarDiffusivity& D, double U_minus, double U_plus,
                                   double U0, double Q0);

struct LpCheck {
  double lhs = 0.0;  // ||U'||_p^p on the grid
  double rhs = 0.0;  // hat-C_theta^{p-1} * tilde-C_{p,theta}
  bool quadrature_ok = true;
  bool holds = false;
};

LpCheck lp_derivative_check(const Profile& profile, const ScalarDiffusivity& D, double p,
                            double theta);

enum class OracleId { Linear, DegenI, DegenII, DegenIII, GlPhase };

OracleId oracle_id_from_string(const std::string& name);

/// Closed-form diffusivities for the built-in examples. For Linear the
/// parameter is the constant D; the others ignore it.
ScalarDiffusivity oracle_diffusivity(OracleId id, double param = 1.0);

/// Analytically exact grid samples of the corresponding profile. GlPhase has
/// no closed-form profile and throws; use oracle_diffusivity instead.
Profile closed_form_oracle(OracleId id, const Grid& grid, double param = 1.0);

/// Brackets on Q(0)^2 from the integrated estimates:
///   int_{U_-}^{U0} (s - U_-) D ds <= 2 Q0^2 <= (U0 - U_-) int_{U_-}^{U0} D ds
/// and the mirrored pair on [U0, U_+]. Returns true when both hold within the
/// multiplicative slack.
bool q0_quadrature_bracket(const ScalarDiffusivity& D, double U_minus, double U_plus, double U0,
                           double Q0, double rel_slack = 0.01);

}  // namespace simprof
