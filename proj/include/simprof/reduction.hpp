#pragma once

#include <functional>
#include <string>
#include <vector>

#include "simprof/core.hpp"

namespace simprof {

/// Reversible mass-action reaction alpha -> beta with rate constant k,
/// written in detailed-balance form relative to the equilibrium w.
struct Reaction {
  Eigen::VectorXi alpha;
  Eigen::VectorXi beta;
  double k = 1.0;
};

/// Mass-action network with a strictly positive detailed-balance equilibrium.
struct ReactionNetwork {
  int species_count = 0;
  std::vector<Reaction> reactions;
  VectorXd w;

  void validate() const;

  /// Columns are the reaction vectors beta^r - alpha^r.
  MatrixXd stoichiometric_matrix() const;

  /// R(c) = sum_r k_r (c^alpha / w^alpha - c^beta / w^beta) (beta - alpha);
  /// vanishes at c = w and whenever all reactions are in equilibrium.
  VectorXd rate(const VectorXd& c) const;
};

/// Built-in example networks.
ReactionNetwork network_two_species(int gamma_coeff, int beta_coeff, double k = 1.0);
ReactionNetwork network_three_species(double k = 1.0);  // X3 <-> X1 + X2
ReactionNetwork network_two_reactions(double k1 = 1.0, double k2 = 1.0);  // 2X1 <-> X2, X2 <-> X3

/// Conserved-quantity matrix: rows form an integer basis of the orthogonal
/// complement of the stoichiometric subspace, with pivots taken from the
/// highest-index species so the conventional matrices are reproduced.
/// Satisfies Q (beta^r - alpha^r) = 0 exactly for every reaction.
MatrixXd build_Q(const ReactionNetwork& network);

/// Closed-form equilibrium parametrizations c = Psi(u) for the example
/// networks (c solves R(c) = 0 with Q c = u).
VectorXd psi_three_species(const VectorXd& u);
MatrixXd psi_three_species_jacobian(const VectorXd& u);
VectorXd psi_two_reactions(double u);
VectorXd psi_two_species(double beta_coeff, double gamma_coeff, double u);

struct PsiResult {
  VectorXd c;
  bool converged = false;
  bool clipped = false;  // coordinates below 1e-14 were clipped to 0
  int iterations = 0;
};

/// General equilibrium parametrization: minimizes the Boltzmann free energy
/// sum_i w_i lb(c_i / w_i) subject to Q c = u, solved through its dual
/// log(c_i / w_i) = (Q^T mu)_i by Newton's method on
/// F(mu) = Q (w .* exp(Q^T mu)) - u, started at mu = 0.
PsiResult psi_general(const ReactionNetwork& network, const MatrixXd& Q, const VectorXd& u);

/// Jacobian of the constrained minimizer: DPsi = diag(c) Q^T (Q diag(c) Q^T)^{-1}.
MatrixXd psi_general_jacobian(const MatrixXd& Q, const VectorXd& c);

/// Reduced constitutive map A(u) = Q D Psi(u) with Jacobian Q D DPsi(u),
/// constants certified on the given box.
VectorFluxMap reduced_flux_map(const ReactionNetwork& network, const VectorXd& d_diag,
                               const MatrixXd& Q, const Box& certify_box,
                               int samples_per_axis = 17);

/// Strict monotonicity region of the reduced three-species map:
/// (3 - sqrt(8)) d3 < d_j < (3 + sqrt(8)) d3 for j = 1, 2.
bool monotonicity_lemma_check(double d1, double d2, double d3);

struct LiftedProfile {
  Profile C;                       // full concentration profile, dim = species_count
  std::vector<bool> node_feasible; // U inside the admissible cone at this node
  bool all_feasible = true;
};

/// Lift a reduced profile nodewise through psi: C(y) = Psi(U(y)); nodes with
/// negative reduced coordinates are flagged, not rejected.
LiftedProfile lift_profile(const Profile& U_profile,
                           const std::function<VectorXd(const VectorXd&)>& psi);

struct MultiplierReport {
  /// Least-squares coefficients of D C'' + (y/2) C' on the reaction
  /// directions, one vector (dim = number of reactions used in the basis) per
  /// interior node.
  std::vector<VectorXd> lambda;
  double max_lambda_norm = 0.0;
  /// Largest norm of the part of D C'' + (y/2) C' orthogonal to the
  /// stoichiometric subspace; ~0 for valid constrained profiles.
  double max_off_residual = 0.0;
};

MultiplierReport lagrange_multiplier(const Profile& C_profile, const VectorXd& d_diag,
                                     const ReactionNetwork& network);

}  // namespace simprof
