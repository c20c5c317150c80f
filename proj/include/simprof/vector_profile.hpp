#pragma once

#include <vector>

#include "simprof/core.hpp"

namespace simprof {

/// Configuration for the implicit vector profile solver.
struct VectorSolveConfig {
  Grid grid;
  /// Decreasing regularization strengths for the continuation
  /// A_eps(u) = A(u) + eps*u.  Empty means: {0} when a_lo > 0, else a
  /// geometric schedule 1e-1..1e-8 followed by an attempted eps = 0 stage.
  std::vector<double> eps_schedule;
  double newton_tol = 1e-10;
  int newton_max_iter = 60;
  double damping = 0.5;
  /// Amplitude of uniform random noise added to the initial iterate v = 0
  /// (used by the uniqueness probe); 0 keeps the deterministic start.
  double initial_noise = 0.0;
  unsigned seed = 0;
};

/// Diagnostics from solve_vector.
struct VectorSolveReport {
  bool regularized = false;          // eps = 0 stage did not converge
  double final_eps = 0.0;            // regularization of the returned profile
  double final_residual = 0.0;       // infinity norm of the discrete residual
  std::vector<double> stage_eps;     // continuation stages actually solved
  std::vector<double> stage_diffs;   // sup-norm change of U between stages
  int total_newton_iterations = 0;
};

/// Source term g(y) = integral_{-inf}^{y} (eta/2) * tilde_u'(eta) d eta,
/// sampled on the grid.  The integrand is odd with compact support, so g
/// vanishes identically outside the interpolant's transition zone; exact
/// zeros are enforced there and g is extended by its even symmetry.
std::vector<VectorXd> g_source(const TildeU& tilde_u, const Grid& grid);

/// Solve A(U)'' + (y/2) U' = 0 with U(+-inf) = U_+- by writing U = tilde_u + v'
/// and solving the once-integrated equation
///   (A_eps(tilde_u + v'))' + (y/2) v' - v/2 + g = 0,  v(+-L) = 0,
/// with centered differences and a damped Newton iteration, continuing over
/// the eps schedule.  Requires a_lo + delta > 0.
Profile solve_vector(const VectorFluxMap& A, const BoundaryPair& boundary,
                     const VectorSolveConfig& config, VectorSolveReport* report = nullptr);

/// Closed-form profile for the linear flux map A(u) = Amat * u:
///   U(y) = U_- + (4*pi)^(-1/2) * Int_{-L}^{y} Amat^(-1/2) exp(-eta^2 (4 Amat)^(-1)) d eta * (U_+ - U_-),
/// evaluated through the eigendecomposition of Amat (principal square root)
/// and trapezoid quadrature on a refined grid.  All eigenvalues of Amat must
/// have positive real part.
Profile linear_matrix_profile(const MatrixXd& Amat, const BoundaryPair& boundary,
                              const Grid& grid, int refine = 8);

/// Quantities appearing in the a priori energy estimate, the Gaussian flux
/// envelope, and the uniform sup-norm bound for the solved profile.
struct TheoremEstimates {
  /// a_lo*||U'||_L2^2 + ||U - tilde_u||_L2^2 + ||v||_H1^2 / a_up
  double energy = 0.0;
  /// energy / (a_up^(1/2) * Delta^2); finite and O(1) across parameter sweeps
  double energy_ratio = 0.0;
  /// worst multiplicative violation of |q(y)| <= |q(0)| e^(-delta y^2 / 4)
  double flux_envelope_worst_ratio = 0.0;
  bool flux_envelope_ok = false;
  double sup_deviation = 0.0;        // max_y |U(y) - tilde_u(y)|
  double sup_deviation_ratio = 0.0;  // vs (a_up^(1/2) / (delta^(1/2) a_lo)) * Delta
  bool sup_ratio_defined = false;    // requires delta > 0 and a_lo > 0
};

TheoremEstimates verify_theorem_estimates(const Profile& profile, const VectorFluxMap& A,
                                          const CertifiedConstants& constants,
                                          const TildeU& tilde_u,
                                          double envelope_slack = 1.02);

/// Zeroth and first moment identities for the deviation from the step
/// function:  Int (U - step) dy = 0  and  Int y (step - U) dy = A(U_+) - A(U_-).
struct IntegralRelations {
  VectorXd moment0;           // Int (U - step) dy, should vanish
  VectorXd moment1_residual;  // Int y (step - U) dy - (A(U_+) - A(U_-)), should vanish
  bool decay_ok = false;      // profile reached its limits at the grid ends
};

IntegralRelations integral_relations(const Profile& profile, const VectorFluxMap& A);

/// Max over a family of compactly supported polynomial bumps psi of
/// | Int ( A(U) . psi'' - U . ((y/2) psi)' ) dy |, componentwise; the weak
/// form of the profile equation.  Each bump is normalized so the reported
/// value is per unit test function.
double verify_weak_residual(const Profile& profile, const VectorFluxMap& A,
                            int test_family_size = 20);

/// Convenience: linear flux map A(u) = Amat * u with constants certified
/// directly from the matrix.
VectorFluxMap make_linear_flux_map(const MatrixXd& Amat);

}  // namespace simprof
