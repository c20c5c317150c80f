#include "simprof/reduction.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace simprof {

namespace {

double power(double base, int e) {
  if (e == 0) return 1.0;
  return std::pow(base, e);
}

// Smallest integer multiplier (up to a search bound) making every entry of
// the row integral; returns 0 when none exists.
long find_integer_scale(const VectorXd& row, long max_scale = 10000) {
  for (long s = 1; s <= max_scale; ++s) {
    bool ok = true;
    for (int j = 0; j < row.size(); ++j) {
      double v = row(j) * static_cast<double>(s);
      if (std::abs(v - std::llround(v)) > 1e-9 * (1.0 + std::abs(v))) {
        ok = false;
        break;
      }
    }
    if (ok) return s;
  }
  return 0;
}

}  // namespace

void ReactionNetwork::validate() const {
  if (species_count <= 0) throw std::invalid_argument("ReactionNetwork: no species");
  if (w.size() != species_count)
    throw std::invalid_argument("ReactionNetwork: equilibrium dimension mismatch");
  for (int i = 0; i < species_count; ++i)
    if (!(w(i) > 0.0)) throw std::invalid_argument("ReactionNetwork: equilibrium must be positive");
  for (const Reaction& r : reactions) {
    if (r.alpha.size() != species_count || r.beta.size() != species_count)
      throw std::invalid_argument("ReactionNetwork: stoichiometric vector dimension mismatch");
    if ((r.alpha.array() < 0).any() || (r.beta.array() < 0).any())
      throw std::invalid_argument("ReactionNetwork: stoichiometric coefficients must be >= 0");
    if (!(r.k > 0.0)) throw std::invalid_argument("ReactionNetwork: rate constants must be positive");
  }
}

MatrixXd ReactionNetwork::stoichiometric_matrix() const {
  MatrixXd S(species_count, static_cast<int>(reactions.size()));
  for (size_t r = 0; r < reactions.size(); ++r)
    S.col(static_cast<int>(r)) = (reactions[r].beta - reactions[r].alpha).cast<double>();
  return S;
}

VectorXd ReactionNetwork::rate(const VectorXd& c) const {
  VectorXd R = VectorXd::Zero(species_count);
  for (const Reaction& rxn : reactions) {
    double forward = 1.0, backward = 1.0;
    for (int i = 0; i < species_count; ++i) {
      double rho = c(i) / w(i);
      forward *= power(rho, rxn.alpha(i));
      backward *= power(rho, rxn.beta(i));
    }
    R += rxn.k * (forward - backward) * (rxn.beta - rxn.alpha).cast<double>();
  }
  return R;
}

ReactionNetwork network_two_species(int gamma_coeff, int beta_coeff, double k) {
  ReactionNetwork net;
  net.species_count = 2;
  Reaction r;
  r.alpha = Eigen::VectorXi::Zero(2);
  r.beta = Eigen::VectorXi::Zero(2);
  r.alpha(0) = gamma_coeff;  // gamma X1 <-> beta X2
  r.beta(1) = beta_coeff;
  r.k = k;
  net.reactions = {r};
  net.w = VectorXd::Ones(2);
  net.validate();
  return net;
}

ReactionNetwork network_three_species(double k) {
  ReactionNetwork net;
  net.species_count = 3;
  Reaction r;
  r.alpha = Eigen::VectorXi::Zero(3);
  r.beta = Eigen::VectorXi::Zero(3);
  r.alpha(2) = 1;  // X3 <-> X1 + X2
  r.beta(0) = 1;
  r.beta(1) = 1;
  r.k = k;
  net.reactions = {r};
  net.w = VectorXd::Ones(3);
  net.validate();
  return net;
}

ReactionNetwork network_two_reactions(double k1, double k2) {
  ReactionNetwork net;
  net.species_count = 3;
  Reaction r1, r2;
  r1.alpha = Eigen::VectorXi::Zero(3);
  r1.beta = Eigen::VectorXi::Zero(3);
  r1.alpha(0) = 2;  // 2 X1 <-> X2
  r1.beta(1) = 1;
  r1.k = k1;
  r2.alpha = Eigen::VectorXi::Zero(3);
  r2.beta = Eigen::VectorXi::Zero(3);
  r2.alpha(1) = 1;  // X2 <-> X3
  r2.beta(2) = 1;
  r2.k = k2;
  net.reactions = {r1, r2};
  net.w = VectorXd::Ones(3);
  net.validate();
  return net;
}

MatrixXd build_Q(const ReactionNetwork& network) {
  network.validate();
  int i_star = network.species_count;
  if (network.reactions.empty()) return MatrixXd::Identity(i_star, i_star);

  // Null space of S^T by full row reduction, choosing pivots from the
  // highest-index species first so the low-index species parametrize the
  // conserved quantities (this reproduces the conventional matrices).
  MatrixXd B = network.stoichiometric_matrix().transpose();
  int r = static_cast<int>(B.rows());
  std::vector<int> pivot_cols;
  int row = 0;
  for (int col = i_star - 1; col >= 0 && row < r; --col) {
    int best = -1;
    double best_val = 1e-12;
    for (int k = row; k < r; ++k)
      if (std::abs(B(k, col)) > best_val) {
        best_val = std::abs(B(k, col));
        best = k;
      }
    if (best < 0) continue;
    B.row(row).swap(B.row(best));
    B.row(row) /= B(row, col);
    for (int k = 0; k < r; ++k)
      if (k != row && B(k, col) != 0.0) B.row(k) -= B(k, col) * B.row(row);
    pivot_cols.push_back(col);
    ++row;
  }
  int rank = row;
  int m_star = i_star - rank;
  if (m_star == 0)
    throw std::invalid_argument("build_Q: stoichiometric subspace is full-dimensional");

  std::vector<bool> is_pivot(static_cast<size_t>(i_star), false);
  for (int c : pivot_cols) is_pivot[static_cast<size_t>(c)] = true;

  MatrixXd Q(m_star, i_star);
  int out = 0;
  for (int f = 0; f < i_star; ++f) {
    if (is_pivot[static_cast<size_t>(f)]) continue;
    VectorXd q = VectorXd::Zero(i_star);
    q(f) = 1.0;
    for (int p = 0; p < rank; ++p) q(pivot_cols[static_cast<size_t>(p)]) = -B(p, f);
    long s = find_integer_scale(q);
    if (s > 0) {
      q *= static_cast<double>(s);
      long g = 0;
      for (int j = 0; j < i_star; ++j) g = std::gcd(g, std::llround(q(j)));
      if (g > 1) q /= static_cast<double>(g);
      for (int j = 0; j < i_star; ++j) q(j) = std::round(q(j));
    }
    Q.row(out++) = q.transpose();
  }
  return Q;
}

VectorXd psi_three_species(const VectorXd& u) {
  if (u.size() != 2) throw std::invalid_argument("psi_three_species: u must be 2-dimensional");
  if (u(0) < 0.0 || u(1) < 0.0)
    throw std::invalid_argument("psi_three_species: u must be nonnegative");
  double t = 1.0 + u(0) + u(1);
  double s = std::sqrt(t * t - 4.0 * u(0) * u(1));
  VectorXd c(3);
  c(0) = 0.5 * (u(0) - u(1) - 1.0 + s);
  c(1) = 0.5 * (u(1) - u(0) - 1.0 + s);
  c(2) = 0.5 * (u(0) + u(1) + 1.0 - s);
  for (int i = 0; i < 3; ++i) c(i) = std::max(c(i), 0.0);
  return c;
}

MatrixXd psi_three_species_jacobian(const VectorXd& u) {
  double t = 1.0 + u(0) + u(1);
  double s = std::sqrt(t * t - 4.0 * u(0) * u(1));
  double s1 = (t - 2.0 * u(1)) / s;
  double s2 = (t - 2.0 * u(0)) / s;
  MatrixXd J(3, 2);
  J << 0.5 * (1.0 + s1), 0.5 * (-1.0 + s2),
       0.5 * (-1.0 + s1), 0.5 * (1.0 + s2),
       0.5 * (1.0 - s1), 0.5 * (1.0 - s2);
  return J;
}

VectorXd psi_two_reactions(double u) {
  if (u < 0.0) throw std::invalid_argument("psi_two_reactions: u must be nonnegative");
  double sigma = (std::sqrt(1.0 + 16.0 * u) - 1.0) / 8.0;
  VectorXd c(3);
  c(0) = sigma;
  c(1) = 0.25 * (u - sigma);
  c(2) = c(1);
  return c;
}

VectorXd psi_two_species(double beta_coeff, double gamma_coeff, double u) {
  if (u < 0.0) throw std::invalid_argument("psi_two_species: u must be nonnegative");
  VectorXd c(2);
  if (beta_coeff == gamma_coeff) {
    c(0) = c(1) = u / (beta_coeff + gamma_coeff);
    return c;
  }
  // beta c1 + gamma c2 = u with c2 = c1^(gamma/beta), increasing in c1
  double expo = gamma_coeff / beta_coeff;
  auto f = [&](double c1) { return beta_coeff * c1 + gamma_coeff * std::pow(c1, expo) - u; };
  double lo = 0.0, hi = u / beta_coeff;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  double c1 = 0.5 * (lo + hi);
  // Newton polish
  for (int it = 0; it < 4; ++it) {
    if (c1 <= 0.0) break;
    double df = beta_coeff + gamma_coeff * expo * std::pow(c1, expo - 1.0);
    double step = f(c1) / df;
    double cand = c1 - step;
    if (cand > 0.0 && cand <= u / beta_coeff) c1 = cand;
  }
  c(0) = c1;
  c(1) = std::pow(c1, expo);
  return c;
}

PsiResult psi_general(const ReactionNetwork& network, const MatrixXd& Q, const VectorXd& u) {
  int i_star = network.species_count;
  int m_star = static_cast<int>(Q.rows());
  if (Q.cols() != i_star || u.size() != m_star)
    throw std::invalid_argument("psi_general: dimension mismatch");

  PsiResult out;
  VectorXd mu = VectorXd::Zero(m_star);
  auto primal = [&](const VectorXd& m) {
    VectorXd logc = Q.transpose() * m;
    VectorXd c(i_star);
    for (int i = 0; i < i_star; ++i) c(i) = network.w(i) * std::exp(std::min(logc(i), 700.0));
    return c;
  };
  double tol = 1e-13 * (1.0 + u.lpNorm<Eigen::Infinity>());
  VectorXd c = primal(mu);
  VectorXd F = Q * c - u;
  for (int it = 0; it < 200; ++it) {
    if (F.lpNorm<Eigen::Infinity>() <= tol) {
      out.converged = true;
      out.iterations = it;
      break;
    }
    MatrixXd J = Q * c.asDiagonal() * Q.transpose();
    Eigen::LLT<MatrixXd> llt(J);
    if (llt.info() != Eigen::Success) break;
    VectorXd dmu = llt.solve(-F);
    if (!dmu.allFinite()) break;
    double step = 1.0;
    double f0 = F.norm();
    bool accepted = false;
    while (step >= 1e-12) {
      VectorXd cand = mu + step * dmu;
      VectorXd cc = primal(cand);
      VectorXd Fc = Q * cc - u;
      if (Fc.allFinite() && Fc.norm() <= (1.0 - 1e-4 * step) * f0) {
        mu = std::move(cand);
        c = std::move(cc);
        F = std::move(Fc);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!out.converged && F.lpNorm<Eigen::Infinity>() <= tol) out.converged = true;
  for (int i = 0; i < i_star; ++i)
    if (c(i) < 1e-14) {
      c(i) = 0.0;
      out.clipped = true;
    }
  out.c = c;
  return out;
}

MatrixXd psi_general_jacobian(const MatrixXd& Q, const VectorXd& c) {
  MatrixXd G = Q * c.asDiagonal() * Q.transpose();
  return c.asDiagonal() * Q.transpose() * G.llt().solve(MatrixXd::Identity(Q.rows(), Q.rows()));
}

VectorFluxMap reduced_flux_map(const ReactionNetwork& network, const VectorXd& d_diag,
                               const MatrixXd& Q, const Box& certify_box, int samples_per_axis) {
  network.validate();
  if (d_diag.size() != network.species_count)
    throw std::invalid_argument("reduced_flux_map: diffusion diagonal dimension mismatch");
  for (int i = 0; i < d_diag.size(); ++i)
    if (!(d_diag(i) > 0.0))
      throw std::invalid_argument("reduced_flux_map: diffusivities must be positive");

  VectorFluxMap out;
  out.dim = static_cast<int>(Q.rows());
  ReactionNetwork net = network;
  MatrixXd Qc = Q;
  VectorXd d = d_diag;
  out.A = [net, Qc, d](const VectorXd& u) -> VectorXd {
    PsiResult p = psi_general(net, Qc, u);
    if (!p.converged)
      throw std::runtime_error("reduced_flux_map: equilibrium parametrization failed to converge");
    return Qc * d.asDiagonal() * p.c;
  };
  out.jacobian = [net, Qc, d](const VectorXd& u) -> MatrixXd {
    PsiResult p = psi_general(net, Qc, u);
    if (!p.converged)
      throw std::runtime_error("reduced_flux_map: equilibrium parametrization failed to converge");
    return Qc * d.asDiagonal() * psi_general_jacobian(Qc, p.c);
  };
  CertifiedConstants cc = certify_constants(out, certify_box, samples_per_axis);
  out.a_lo = cc.a_lo_est;
  out.a_up = cc.a_up_est;
  out.delta = cc.delta_est;
  return out;
}

bool monotonicity_lemma_check(double d1, double d2, double d3) {
  if (!(d1 > 0.0 && d2 > 0.0 && d3 > 0.0))
    throw std::invalid_argument("monotonicity_lemma_check: diffusivities must be positive");
  double lo = (3.0 - std::sqrt(8.0)) * d3;
  double hi = (3.0 + std::sqrt(8.0)) * d3;
  return d1 > lo && d1 < hi && d2 > lo && d2 < hi;
}

LiftedProfile lift_profile(const Profile& U_profile,
                           const std::function<VectorXd(const VectorXd&)>& psi) {
  LiftedProfile out;
  out.C.grid = U_profile.grid;
  size_t n = U_profile.U.size();
  out.C.U.resize(n);
  out.C.Q.resize(n);
  out.node_feasible.resize(n, true);
  for (size_t i = 0; i < n; ++i) {
    VectorXd u = U_profile.U[i];
    bool feas = (u.array() >= 0.0).all();
    out.node_feasible[i] = feas;
    if (!feas) {
      out.all_feasible = false;
      u = u.cwiseMax(0.0);
    }
    out.C.U[i] = psi(u);
    out.C.Q[i] = VectorXd::Zero(out.C.U[i].size());
  }
  out.C.boundary = BoundaryPair(out.C.U.front(), out.C.U.back());
  // companion flux of the lifted profile by centered differences of C itself
  double h = U_profile.grid.spacing;
  for (size_t i = 1; i + 1 < n; ++i) out.C.Q[i] = (out.C.U[i + 1] - out.C.U[i - 1]) / (2.0 * h);
  return out;
}

MultiplierReport lagrange_multiplier(const Profile& C_profile, const VectorXd& d_diag,
                                     const ReactionNetwork& network) {
  const Grid& grid = C_profile.grid;
  int n = grid.n_points;
  if (n < 3) throw std::invalid_argument("lagrange_multiplier: grid too coarse");
  MatrixXd S = network.stoichiometric_matrix();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(S);
  double h = grid.spacing;

  MultiplierReport out;
  out.lambda.reserve(static_cast<size_t>(n - 2));
  for (int i = 1; i < n - 1; ++i) {
    VectorXd cpp = (C_profile.U[static_cast<size_t>(i + 1)] -
                    2.0 * C_profile.U[static_cast<size_t>(i)] +
                    C_profile.U[static_cast<size_t>(i - 1)]) /
                   (h * h);
    VectorXd cp = (C_profile.U[static_cast<size_t>(i + 1)] -
                   C_profile.U[static_cast<size_t>(i - 1)]) /
                  (2.0 * h);
    VectorXd r = d_diag.asDiagonal() * cpp + 0.5 * grid.node(i) * cp;
    VectorXd lam = qr.solve(r);
    out.max_off_residual = std::max(out.max_off_residual, (r - S * lam).norm());
    out.max_lambda_norm = std::max(out.max_lambda_norm, lam.norm());
    out.lambda.push_back(std::move(lam));
  }
  return out;
}

}  // namespace simprof
