#include "simprof/vector_profile.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace simprof {

namespace {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct DiscreteSystem {
  const VectorFluxMap* A = nullptr;
  double eps = 0.0;
  const Grid* grid = nullptr;
  std::vector<double> y;
  std::vector<VectorXd> tilde;    // interpolant at nodes
  std::vector<VectorXd> g;        // source at nodes
  int n = 0;
  int m = 0;

  int unknowns() const { return n * m; }

  VectorXd A_eps(const VectorXd& u) const { return A->A(u) + eps * u; }
  MatrixXd DA_eps(const VectorXd& u) const {
    return A->jacobian(u) + eps * MatrixXd::Identity(m, m);
  }

  // v' at every node: centered inside, second-order one-sided at the ends.
  std::vector<VectorXd> derivative(const std::vector<VectorXd>& v) const {
    double inv2h = 1.0 / (2.0 * grid->spacing);
    std::vector<VectorXd> vp(static_cast<size_t>(n));
    vp[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h;
    for (int i = 1; i < n - 1; ++i)
      vp[static_cast<size_t>(i)] =
          (v[static_cast<size_t>(i + 1)] - v[static_cast<size_t>(i - 1)]) * inv2h;
    vp[static_cast<size_t>(n - 1)] =
        (3.0 * v[static_cast<size_t>(n - 1)] - 4.0 * v[static_cast<size_t>(n - 2)] +
         v[static_cast<size_t>(n - 3)]) *
        inv2h;
    return vp;
  }

  // Residual of the once-integrated equation with Dirichlet rows at the ends.
  VectorXd residual(const VectorXd& vflat) const {
    std::vector<VectorXd> v = unflatten(vflat);
    std::vector<VectorXd> vp = derivative(v);
    std::vector<VectorXd> W(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      W[static_cast<size_t>(i)] = A_eps(tilde[static_cast<size_t>(i)] + vp[static_cast<size_t>(i)]);
    double inv2h = 1.0 / (2.0 * grid->spacing);
    VectorXd F(unknowns());
    F.segment(0, m) = v[0];
    F.segment((n - 1) * m, m) = v[static_cast<size_t>(n - 1)];
    for (int i = 1; i < n - 1; ++i) {
      VectorXd row = (W[static_cast<size_t>(i + 1)] - W[static_cast<size_t>(i - 1)]) * inv2h +
                     0.5 * y[static_cast<size_t>(i)] * vp[static_cast<size_t>(i)] -
                     0.5 * v[static_cast<size_t>(i)] + g[static_cast<size_t>(i)];
      F.segment(i * m, m) = row;
    }
    return F;
  }

  SparseMat jacobian_matrix(const VectorXd& vflat) const {
    std::vector<VectorXd> v = unflatten(vflat);
    std::vector<VectorXd> vp = derivative(v);
    std::vector<MatrixXd> J(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      J[static_cast<size_t>(i)] = DA_eps(tilde[static_cast<size_t>(i)] + vp[static_cast<size_t>(i)]);
    double inv2h = 1.0 / (2.0 * grid->spacing);

    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(unknowns()) * static_cast<size_t>(3 * m + 3));
    auto add_block = [&](int row_node, int col_node, const MatrixXd& B) {
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          if (B(r, c) != 0.0) trip.emplace_back(row_node * m + r, col_node * m + c, B(r, c));
    };
    auto add_scaled_identity = [&](int row_node, int col_node, double s) {
      for (int r = 0; r < m; ++r) trip.emplace_back(row_node * m + r, col_node * m + r, s);
    };

    add_scaled_identity(0, 0, 1.0);
    add_scaled_identity(n - 1, n - 1, 1.0);

    // d vp_k / d v_j as (node, weight) pairs.
    auto dvp = [&](int k, std::vector<std::pair<int, double>>& out) {
      out.clear();
      if (k == 0) {
        out = {{0, -3.0 * inv2h}, {1, 4.0 * inv2h}, {2, -inv2h}};
      } else if (k == n - 1) {
        out = {{n - 1, 3.0 * inv2h}, {n - 2, -4.0 * inv2h}, {n - 3, inv2h}};
      } else {
        out = {{k + 1, inv2h}, {k - 1, -inv2h}};
      }
    };

    std::vector<std::pair<int, double>> stencil;
    for (int i = 1; i < n - 1; ++i) {
      // (W_{i+1} - W_{i-1}) / (2h) terms
      for (int which : {i + 1, i - 1}) {
        double sign = (which == i + 1) ? inv2h : -inv2h;
        dvp(which, stencil);
        for (auto& [node, w] : stencil) add_block(i, node, (sign * w) * J[static_cast<size_t>(which)]);
      }
      // (y/2) vp_i
      dvp(i, stencil);
      for (auto& [node, w] : stencil)
        add_scaled_identity(i, node, 0.5 * y[static_cast<size_t>(i)] * w);
      // -v_i / 2
      add_scaled_identity(i, i, -0.5);
    }
    SparseMat Jm(unknowns(), unknowns());
    Jm.setFromTriplets(trip.begin(), trip.end());
    return Jm;
  }

  std::vector<VectorXd> unflatten(const VectorXd& vflat) const {
    std::vector<VectorXd> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = vflat.segment(i * m, m);
    return v;
  }
};

// Damped Newton on the discrete residual; returns true on convergence.
bool newton_solve(const DiscreteSystem& sys, VectorXd& vflat, const VectorSolveConfig& cfg,
                  int* iterations) {
  VectorXd F = sys.residual(vflat);
  double phi = 0.5 * F.squaredNorm();
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    if (F.lpNorm<Eigen::Infinity>() <= cfg.newton_tol) {
      if (iterations) *iterations += it;
      return true;
    }
    SparseMat J = sys.jacobian_matrix(vflat);
    Eigen::SparseLU<SparseMat> lu;
    lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) return false;
    VectorXd dv = lu.solve(-F);
    if (!dv.allFinite()) return false;

    double step = 1.0;
    bool accepted = false;
    while (step >= std::ldexp(1.0, -20)) {
      VectorXd cand = vflat + step * dv;
      VectorXd Fc = sys.residual(cand);
      double phic = 0.5 * Fc.squaredNorm();
      if (std::isfinite(phic) && phic <= (1.0 - 1e-4 * step) * phi) {
        vflat = std::move(cand);
        F = std::move(Fc);
        phi = phic;
        accepted = true;
        break;
      }
      step *= cfg.damping;
    }
    if (!accepted) return false;
  }
  if (iterations) *iterations += cfg.newton_max_iter;
  return F.lpNorm<Eigen::Infinity>() <= cfg.newton_tol;
}

std::vector<VectorXd> assemble_U(const DiscreteSystem& sys, const VectorXd& vflat) {
  std::vector<VectorXd> v = sys.unflatten(vflat);
  std::vector<VectorXd> vp = sys.derivative(v);
  std::vector<VectorXd> U(static_cast<size_t>(sys.n));
  for (int i = 0; i < sys.n; ++i)
    U[static_cast<size_t>(i)] = sys.tilde[static_cast<size_t>(i)] + vp[static_cast<size_t>(i)];
  return U;
}

// Flux Q = (A(U))' by centered differences of node values of A(U).
std::vector<VectorXd> flux_of(const std::vector<VectorXd>& U, const Grid& grid,
                              const VectorFluxMap& A) {
  int n = grid.n_points;
  std::vector<VectorXd> AU(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) AU[static_cast<size_t>(i)] = A.A(U[static_cast<size_t>(i)]);
  double inv2h = 1.0 / (2.0 * grid.spacing);
  std::vector<VectorXd> Q(static_cast<size_t>(n));
  Q[0] = (-3.0 * AU[0] + 4.0 * AU[1] - AU[2]) * inv2h;
  for (int i = 1; i < n - 1; ++i)
    Q[static_cast<size_t>(i)] =
        (AU[static_cast<size_t>(i + 1)] - AU[static_cast<size_t>(i - 1)]) * inv2h;
  Q[static_cast<size_t>(n - 1)] =
      (3.0 * AU[static_cast<size_t>(n - 1)] - 4.0 * AU[static_cast<size_t>(n - 2)] +
       AU[static_cast<size_t>(n - 3)]) *
      inv2h;
  return Q;
}

double sup_diff(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, (a[i] - b[i]).lpNorm<Eigen::Infinity>());
  return worst;
}

double trapz_weight(const Grid& g, int i) {
  return (i == 0 || i == g.n_points - 1) ? 0.5 * g.spacing : g.spacing;
}

}  // namespace

std::vector<VectorXd> g_source(const TildeU& tilde_u, const Grid& grid) {
  int n = grid.n_points;
  int m = tilde_u.boundary().dim();
  std::vector<double> y = grid.nodes();
  double r = tilde_u.support_radius();
  double h = grid.spacing;

  std::vector<VectorXd> g(static_cast<size_t>(n), VectorXd::Zero(m));
  // Cumulative trapezoid on the left half; the integrand (y/2) tilde_u'(y) is
  // odd, so g(y) = g(-y) and g vanishes identically outside the transition
  // zone [-r, r].
  VectorXd accum = VectorXd::Zero(m);
  VectorXd prev = 0.5 * y[0] * tilde_u.derivative(y[0]);
  int center = grid.center_index();
  for (int i = 1; i <= center; ++i) {
    VectorXd cur = 0.5 * y[static_cast<size_t>(i)] * tilde_u.derivative(y[static_cast<size_t>(i)]);
    accum += 0.5 * h * (prev + cur);
    prev = cur;
    if (std::abs(y[static_cast<size_t>(i)]) >= r * (1.0 - 1e-12)) {
      g[static_cast<size_t>(i)] = VectorXd::Zero(m);
    } else {
      g[static_cast<size_t>(i)] = accum;
    }
  }
  for (int i = center + 1; i < n; ++i) g[static_cast<size_t>(i)] = g[static_cast<size_t>(n - 1 - i)];
  return g;
}

Profile solve_vector(const VectorFluxMap& A, const BoundaryPair& boundary,
                     const VectorSolveConfig& config, VectorSolveReport* report) {
  if (boundary.dim() != A.dim)
    throw std::invalid_argument("solve_vector: boundary dimension does not match flux map");
  if (!(A.a_lo + A.delta > 0.0))
    throw std::invalid_argument(
        "solve_vector: monotonicity constants violate a_lo + delta > 0; the flux map is outside "
        "the solvable class");
  if (config.grid.n_points < 5)
    throw std::invalid_argument("solve_vector: grid too coarse for the five-point stencil");

  std::vector<double> schedule = config.eps_schedule;
  bool attempt_zero_tail = false;
  if (schedule.empty()) {
    if (A.a_lo > 0.0) {
      schedule = {0.0};
    } else {
      schedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
      attempt_zero_tail = true;
    }
  } else {
    for (size_t i = 1; i < schedule.size(); ++i)
      if (!(schedule[i] < schedule[i - 1]))
        throw std::invalid_argument("solve_vector: eps_schedule must be strictly decreasing");
    if (A.a_lo <= 0.0 && schedule.back() > 1e-8)
      throw std::invalid_argument(
          "solve_vector: degenerate flux map requires the schedule to reach 1e-8 or below");
  }
  if (!(config.newton_tol > 0.0))
    throw std::invalid_argument("solve_vector: newton_tol must be positive");
  if (!(config.damping > 0.0 && config.damping < 1.0))
    throw std::invalid_argument("solve_vector: damping factor must lie in (0,1)");

  DiscreteSystem sys;
  sys.A = &A;
  sys.grid = &config.grid;
  sys.y = config.grid.nodes();
  sys.n = config.grid.n_points;
  sys.m = boundary.dim();
  double a_up = A.a_up > 0.0 ? A.a_up : 1.0;
  TildeU tilde = build_tilde_u(boundary, a_up);
  sys.tilde.resize(static_cast<size_t>(sys.n));
  for (int i = 0; i < sys.n; ++i)
    sys.tilde[static_cast<size_t>(i)] = tilde.value(sys.y[static_cast<size_t>(i)]);
  sys.g = g_source(tilde, config.grid);

  VectorSolveReport rep;
  VectorXd vflat = VectorXd::Zero(sys.unknowns());
  if (config.initial_noise > 0.0) {
    std::mt19937 rng(config.seed);
    std::uniform_real_distribution<double> unif(-config.initial_noise, config.initial_noise);
    for (int i = sys.m; i < sys.unknowns() - sys.m; ++i) vflat(i) = unif(rng);
  }
  std::vector<VectorXd> prev_U;
  bool have_solution = false;
  VectorXd best_v;
  double best_eps = 0.0;

  auto run_stage = [&](double eps) -> bool {
    sys.eps = eps;
    VectorXd trial = vflat;
    bool ok = newton_solve(sys, trial, config, &rep.total_newton_iterations);
    if (!ok) return false;
    vflat = trial;
    std::vector<VectorXd> U = assemble_U(sys, vflat);
    if (!prev_U.empty()) rep.stage_diffs.push_back(sup_diff(U, prev_U));
    prev_U = std::move(U);
    rep.stage_eps.push_back(eps);
    best_v = vflat;
    best_eps = eps;
    have_solution = true;
    return true;
  };

  for (double eps : schedule) {
    if (!run_stage(eps))
      throw std::runtime_error("solve_vector: Newton failed to converge at eps = " +
                               std::to_string(eps));
  }
  if (attempt_zero_tail) {
    if (!run_stage(0.0)) rep.regularized = true;
  }
  if (!have_solution) throw std::runtime_error("solve_vector: no continuation stage converged");

  sys.eps = best_eps;
  rep.final_eps = best_eps;
  rep.final_residual = sys.residual(best_v).lpNorm<Eigen::Infinity>();

  Profile out;
  out.grid = config.grid;
  out.boundary = boundary;
  out.U = assemble_U(sys, best_v);
  out.Q = flux_of(out.U, config.grid, A);
  if (report) *report = rep;
  return out;
}

Profile linear_matrix_profile(const MatrixXd& Amat, const BoundaryPair& boundary,
                              const Grid& grid, int refine) {
  int m = boundary.dim();
  if (Amat.rows() != m || Amat.cols() != m)
    throw std::invalid_argument("linear_matrix_profile: matrix dimension mismatch");
  if (refine < 1) throw std::invalid_argument("linear_matrix_profile: refine must be >= 1");

  Eigen::ComplexEigenSolver<MatrixXd> es(Amat);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("linear_matrix_profile: eigendecomposition failed");
  Eigen::VectorXcd lam = es.eigenvalues();
  for (int k = 0; k < m; ++k)
    if (!(lam(k).real() > 0.0))
      throw std::invalid_argument(
          "linear_matrix_profile: matrix has an eigenvalue with non-positive real part");
  Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::MatrixXcd Vinv = V.inverse();

  const double inv_sqrt4pi = 1.0 / std::sqrt(4.0 * M_PI);
  VectorXd delta = boundary.U_plus - boundary.U_minus;

  // kernel(y) = (4 pi)^(-1/2) A^(-1/2) exp(-y^2 (4A)^(-1)), via the principal
  // square root on the spectrum.
  auto kernel = [&](double y) -> VectorXd {
    Eigen::VectorXcd diag(m);
    for (int k = 0; k < m; ++k) {
      std::complex<double> s = std::sqrt(lam(k));  // principal branch
      diag(k) = std::exp(-y * y / (4.0 * lam(k))) / s;
    }
    Eigen::VectorXcd w = V * diag.asDiagonal() * (Vinv * delta.cast<std::complex<double>>());
    return inv_sqrt4pi * w.real();
  };

  int n = grid.n_points;
  Profile out;
  out.grid = grid;
  out.boundary = boundary;
  out.U.resize(static_cast<size_t>(n));
  out.Q.resize(static_cast<size_t>(n));

  double hs = grid.spacing / static_cast<double>(refine);
  VectorXd accum = boundary.U_minus;
  out.U[0] = accum;
  for (int i = 1; i < n; ++i) {
    double y0 = grid.node(i - 1);
    VectorXd prev = kernel(y0);
    for (int s = 1; s <= refine; ++s) {
      VectorXd cur = kernel(y0 + hs * static_cast<double>(s));
      accum += 0.5 * hs * (prev + cur);
      prev = cur;
    }
    out.U[static_cast<size_t>(i)] = accum;
  }
  // Q(y) = (4 pi)^(-1/2) A^(1/2) exp(-y^2 (4A)^(-1)) (U_+ - U_-) = A * kernel(y).
  for (int i = 0; i < n; ++i) out.Q[static_cast<size_t>(i)] = Amat * kernel(grid.node(i));
  return out;
}

TheoremEstimates verify_theorem_estimates(const Profile& profile, const VectorFluxMap& A,
                                          const CertifiedConstants& constants,
                                          const TildeU& tilde_u, double envelope_slack) {
  (void)A;
  const Grid& grid = profile.grid;
  int n = grid.n_points;
  std::vector<double> y = grid.nodes();
  double h = grid.spacing;

  TheoremEstimates out;
  double delta_pm = profile.boundary.delta_pm();

  // U', U - tilde, v = cumulative integral of (U - tilde), all on the grid.
  double norm2_Uprime = 0.0, norm2_dev = 0.0, norm2_v = 0.0, norm2_vprime = 0.0;
  VectorXd v = VectorXd::Zero(profile.dim());
  VectorXd prev_dev = profile.U[0] - tilde_u.value(y[0]);
  for (int i = 0; i < n; ++i) {
    double w = trapz_weight(grid, i);
    VectorXd dev = profile.U[static_cast<size_t>(i)] - tilde_u.value(y[static_cast<size_t>(i)]);
    if (i > 0) v += 0.5 * h * (prev_dev + dev);
    prev_dev = dev;
    norm2_dev += w * dev.squaredNorm();
    norm2_v += w * v.squaredNorm();
    norm2_vprime += w * dev.squaredNorm();
    VectorXd up;
    if (i == 0)
      up = (-3.0 * profile.U[0] + 4.0 * profile.U[1] - profile.U[2]) / (2.0 * h);
    else if (i == n - 1)
      up = (3.0 * profile.U[static_cast<size_t>(n - 1)] - 4.0 * profile.U[static_cast<size_t>(n - 2)] +
            profile.U[static_cast<size_t>(n - 3)]) /
           (2.0 * h);
    else
      up = (profile.U[static_cast<size_t>(i + 1)] - profile.U[static_cast<size_t>(i - 1)]) / (2.0 * h);
    norm2_Uprime += w * up.squaredNorm();
    out.sup_deviation = std::max(out.sup_deviation, dev.lpNorm<Eigen::Infinity>());
  }
  double a_up = std::max(constants.a_up_est, 1e-300);
  out.energy = std::max(constants.a_lo_est, 0.0) * norm2_Uprime + norm2_dev +
               (norm2_v + norm2_vprime) / a_up;
  double denom = std::sqrt(a_up) * delta_pm * delta_pm;
  out.energy_ratio = denom > 0.0 ? out.energy / denom : 0.0;

  // Gaussian flux envelope |q(y)| <= |q(0)| exp(-delta y^2 / 4), in log space.
  double delta_mono = constants.delta_est;
  double q0 = profile.Q[static_cast<size_t>(grid.center_index())].norm();
  double qmax = 0.0;
  for (int i = 0; i < n; ++i) qmax = std::max(qmax, profile.Q[static_cast<size_t>(i)].norm());
  // below this the discrete flux is differencing noise, not signal
  double q_cut = std::max(1e-13, 1e-8 * qmax);
  out.flux_envelope_worst_ratio = 0.0;
  if (delta_mono > 0.0 && q0 > 0.0) {
    double logq0 = std::log(q0);
    for (int i = 0; i < n; ++i) {
      double qn = profile.Q[static_cast<size_t>(i)].norm();
      if (qn <= q_cut) continue;
      double excess = std::log(qn) - (logq0 - delta_mono * y[static_cast<size_t>(i)] *
                                                   y[static_cast<size_t>(i)] / 4.0);
      out.flux_envelope_worst_ratio = std::max(out.flux_envelope_worst_ratio, excess);
    }
    out.flux_envelope_worst_ratio = std::exp(out.flux_envelope_worst_ratio);
    out.flux_envelope_ok = out.flux_envelope_worst_ratio <= envelope_slack;
  } else {
    out.flux_envelope_worst_ratio = 1.0;
    out.flux_envelope_ok = delta_pm == 0.0;
    if (delta_pm == 0.0) out.flux_envelope_ok = true;
  }

  if (constants.delta_est > 0.0 && constants.a_lo_est > 0.0 && delta_pm > 0.0) {
    out.sup_ratio_defined = true;
    out.sup_deviation_ratio = out.sup_deviation /
                              (std::sqrt(a_up) / (std::sqrt(constants.delta_est) *
                                                  constants.a_lo_est) *
                               delta_pm);
  }
  return out;
}

IntegralRelations integral_relations(const Profile& profile, const VectorFluxMap& A) {
  const Grid& grid = profile.grid;
  int n = grid.n_points;
  std::vector<double> y = grid.nodes();
  int m = profile.dim();

  IntegralRelations out;
  out.moment0 = VectorXd::Zero(m);
  VectorXd moment1 = VectorXd::Zero(m);
  for (int i = 0; i < n; ++i) {
    double w = trapz_weight(grid, i);
    VectorXd dev = profile.U[static_cast<size_t>(i)] -
                   profile.boundary.step(y[static_cast<size_t>(i)]);
    out.moment0 += w * dev;
    moment1 += w * y[static_cast<size_t>(i)] * (-dev);
  }
  out.moment1_residual =
      moment1 - (A.A(profile.boundary.U_plus) - A.A(profile.boundary.U_minus));

  double tail = std::max((profile.U.front() - profile.boundary.U_minus).lpNorm<Eigen::Infinity>(),
                         (profile.U.back() - profile.boundary.U_plus).lpNorm<Eigen::Infinity>());
  double scale = std::max(profile.boundary.delta_pm(), 1.0);
  out.decay_ok = tail <= 1e-8 * scale;
  return out;
}

double verify_weak_residual(const Profile& profile, const VectorFluxMap& A,
                            int test_family_size) {
  if (test_family_size < 1)
    throw std::invalid_argument("verify_weak_residual: need at least one test function");
  const Grid& grid = profile.grid;
  int n = grid.n_points;
  std::vector<double> y = grid.nodes();
  int m = profile.dim();

  std::vector<VectorXd> AU(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) AU[static_cast<size_t>(i)] = A.A(profile.U[static_cast<size_t>(i)]);

  double L = grid.half_width;
  double width = std::min(2.0, 0.45 * L);
  double span = L - width;
  double worst = 0.0;
  for (int k = 0; k < test_family_size; ++k) {
    double c = (test_family_size == 1)
                   ? 0.0
                   : -span + 2.0 * span * static_cast<double>(k) /
                                 static_cast<double>(test_family_size - 1);
    VectorXd acc = VectorXd::Zero(m);
    for (int i = 0; i < n; ++i) {
      double t = (y[static_cast<size_t>(i)] - c) / width;
      if (std::abs(t) >= 1.0) continue;
      double s = 1.0 - t * t;
      double s2 = s * s;
      // (1 - t^2)^5: C^4 at the support edge, so the trapezoid rule keeps its
      // full order across the cutoff
      double psi = s2 * s2 * s;
      double dpsi = -10.0 * t * s2 * s2 / width;
      double d2psi = (-10.0 * s2 * s2 + 80.0 * t * t * s2 * s) / (width * width);
      double w = trapz_weight(grid, i);
      acc += w * (AU[static_cast<size_t>(i)] * d2psi -
                  profile.U[static_cast<size_t>(i)] *
                      (0.5 * psi + 0.5 * y[static_cast<size_t>(i)] * dpsi));
    }
    worst = std::max(worst, acc.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

VectorFluxMap make_linear_flux_map(const MatrixXd& Amat) {
  int m = static_cast<int>(Amat.rows());
  if (Amat.cols() != m) throw std::invalid_argument("make_linear_flux_map: matrix must be square");
  VectorFluxMap out;
  out.dim = m;
  MatrixXd M = Amat;
  out.A = [M](const VectorXd& u) { return M * u; };
  out.jacobian = [M](const VectorXd&) { return M; };
  Box box{VectorXd::Constant(m, -1.0), VectorXd::Constant(m, 1.0)};
  CertifiedConstants cc = certify_constants(out, box, 2);
  out.a_lo = cc.a_lo_est;
  out.a_up = cc.a_up_est;
  out.delta = cc.delta_est;
  return out;
}

}  // namespace simprof
