#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "simprof/core.hpp"

namespace simprof {

/// Convex entropy density with phi(1) = 0, phi'(1) = 0, phi'' > 0.
struct EntropyDensity {
  std::string label;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> d2phi;
};

/// Power-law entropy: E_p(rho) = (rho^p - p rho + p - 1) / (p (p-1)), with the
/// logarithmic branches E_1 = rho ln rho - rho + 1 and E_0 = rho - 1 - ln rho.
/// E_p(0) = 1/p for p > 0 and +inf for p <= 0.  Evaluation near rho = 1 is
/// cancellation-safe (expm1/log1p path).
EntropyDensity make_Ep(double p);

/// Two-sided entropy: E_p on (0, 1], E_q on [1, inf); C^2 at rho = 1 since
/// E_r''(1) = 1 for every r.
EntropyDensity make_phi_pq(double p, double q);

/// Entropy adapted to the porous-medium nonlinearity u^m:
/// phi_m = phi_{p_m, q_m} with p_m = max(1/2, m-1), q_m = min(1/2, 2-m).
EntropyDensity make_phi_m(double m);

/// One-dimensional flux A(u) with derivative (the diffusivity) dA(u).
struct ScalarFluxMap {
  std::function<double(double)> A;
  std::function<double(double)> dA;
};

ScalarFluxMap linear_flux(double d);
ScalarFluxMap pme_flux(double m);  // A(u) = u^m on u >= 0

/// State of the rescaled diffusion equation u_tau = (A(u))_yy + (y/2) u_y.
struct EvolutionState {
  Grid grid;
  VectorXd u;
  double tau = 0.0;
};

/// Largest stable step for the semi-implicit scheme:
/// min(0.25 h^2 / max A'(u), 0.5 h / (L/2)).
double suggested_dt(const EvolutionState& state, const ScalarFluxMap& A);

/// One semi-implicit step: diffusion linearized around the current state and
/// solved implicitly (tridiagonal), drift (y/2) u_y explicit first-order
/// upwind toward y = 0, Dirichlet ends.  Negative values are clipped to 0
/// with *clipped set (does not trigger for admissible data).  Throws when the
/// solution leaves the boundary range by more than 10%.
EvolutionState step_pde(const EvolutionState& state, const ScalarFluxMap& A, double dt,
                        bool* clipped = nullptr);

/// H_phi(u) = Int phi(u / U) U dy by trapezoid; +inf when phi is infinite at
/// some quotient.  Requires U > 0 nodewise.
double relative_entropy(const VectorXd& u, const VectorXd& U, const EntropyDensity& phi,
                        const Grid& grid);

/// Int (sqrt(u) - sqrt(U))^2 dy by trapezoid.
double hellinger(const VectorXd& u, const VectorXd& U, const Grid& grid);

struct DecayFit {
  double lambda = 0.0;    // decay rate: negated slope of log H versus tau
  double residual = 0.0;  // root-mean-square residual of the linear fit
};

DecayFit decay_rate_fit(const std::vector<double>& tau, const std::vector<double>& H);

struct SigmaReport {
  double Sigma = 0.0;
  double Lambda_predicted = 0.0;
  bool hypothesis_ok = false;
};

/// Sigma_{U,0} = sup U'^2 with Lambda = (1 - C_A^2 Sigma / a_lo) / 2; the
/// decay hypothesis is Lambda > 0.
SigmaReport sigma_check_lipschitz(const Profile& U_profile, double C_A, double a_lo);

/// Sigma_{U,m} = sup U'^2 U^{m-2} with Lambda = (1 - m (m-1)^2 Sigma) / 2;
/// hypothesis Sigma < 1 / (m (m-1)^2) (no restriction at m = 1).
SigmaReport sigma_check_pme(const Profile& U_profile, double m);

enum class InequalityMode { CA, PME };

/// Max over the sample grid (plus one-sided limits at rho = 1) of lhs/rhs for
///   CA:  phi''(rho) rho^2 (rho-1)^2 <= 2 phi(rho)
///   PME: phi''(rho) m (rho^{m-1}-1)^2 / (4 rho^{m-3}) <= (m (m-1)^2 / 2) phi(rho)
/// Valid entropies keep the ratio <= 1 + 1e-9.
double entropy_inequality_check(const EntropyDensity& phi, InequalityMode mode, double m,
                                const std::vector<double>& rho_grid);

/// L_U v = (A'(U) v)'' + (y/2) v' by second-order differences (zero at the
/// two boundary nodes).
VectorXd linearized_apply(const Profile& U_profile, const ScalarFluxMap& A, const VectorXd& v);

/// Relative residuals of the first two eigenpairs of L_U:
///   r1 = ||L_U U' + U'/2||_inf / ||U'||_inf,
///   r2 = ||L_U (y U') + y U'||_inf / ||y U'||_inf,
/// maxima restricted to interior nodes where the weight exceeds 1e-8.
/// Returns (r1, r2); a flat profile yields (0, 0) marked not-applicable via
/// the optional flag.
std::pair<double, double> eigen_residuals(const Profile& U_profile, const ScalarFluxMap& A,
                                          bool* applicable = nullptr);

struct MomentResiduals {
  double residual0 = 0.0;  // d/dtau Int(u - step) + (1/2) Int(u - step)
  double residual1 = 0.0;  // d/dtau Int y(step - u) + Int y(step - u) - (A(U+) - A(U-))
};

/// Finite-difference check of the two moment identities along a uniformly
/// sampled trajectory.
MomentResiduals moment_odes_check(const std::vector<EvolutionState>& trajectory,
                                  const ScalarFluxMap& A, const BoundaryPair& boundary);

}  // namespace simprof
