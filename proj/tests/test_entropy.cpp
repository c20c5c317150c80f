#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "simprof/entropy.hpp"
#include "simprof/quadrature.hpp"
#include "simprof/scalar_profile.hpp"

using namespace simprof;

namespace {

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = std::pow(10.0, llo + (lhi - llo) * i / double(n - 1));
  return out;
}

// Smooth compactly supported bump centered at c with half-width w, max 1.
double bump(double y, double c, double w) {
  double t = (y - c) / w;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

Profile scalar_profile_from(const Grid& grid, double um, double up,
                            const std::function<double(double)>& f) {
  Profile p;
  p.grid = grid;
  p.boundary = BoundaryPair(um, up);
  p.U.assign(static_cast<size_t>(grid.n_points), VectorXd::Zero(1));
  p.Q.assign(static_cast<size_t>(grid.n_points), VectorXd::Zero(1));
  for (int i = 0; i < grid.n_points; ++i) p.U[static_cast<size_t>(i)](0) = f(grid.node(i));
  return p;
}

struct TrajectoryRecord {
  std::vector<EvolutionState> states;  // sampled every `stride` steps
  std::vector<double> tau;
};

TrajectoryRecord evolve(EvolutionState state, const ScalarFluxMap& A, double tau_end,
                        int stride) {
  TrajectoryRecord rec;
  double dt = suggested_dt(state, A);
  rec.states.push_back(state);
  rec.tau.push_back(state.tau);
  int step = 0;
  while (state.tau < tau_end - 1e-12) {
    state = step_pde(state, A, dt);
    if (++step % stride == 0) {
      rec.states.push_back(state);
      rec.tau.push_back(state.tau);
    }
  }
  return rec;
}

}  // namespace

TEST_CASE("power-law entropy densities: normalization and derivatives") {
  for (double p : {-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    EntropyDensity E = make_Ep(p);
    CHECK(std::abs(E.phi(1.0)) <= 1e-15);
    CHECK(std::abs(E.dphi(1.0)) <= 1e-14);
    for (double rho : {0.3, 0.9, 1.0, 1.4, 2.7}) {
      CHECK(E.d2phi(rho) == doctest::Approx(std::pow(rho, p - 2.0)).epsilon(1e-12));
      // finite-difference consistency of the stored derivatives
      double h = 1e-5;
      double d1 = (E.phi(rho + h) - E.phi(rho - h)) / (2.0 * h);
      double d2 = (E.dphi(rho + h) - E.dphi(rho - h)) / (2.0 * h);
      CHECK(d1 == doctest::Approx(E.dphi(rho)).epsilon(5e-7));
      CHECK(d2 == doctest::Approx(E.d2phi(rho)).epsilon(5e-7));
      CHECK(E.phi(rho) >= 0.0);
    }
  }
  // values at rho = 0: 1/p for p > 0, +inf otherwise
  CHECK(make_Ep(2.0).phi(0.0) == doctest::Approx(0.5));
  CHECK(make_Ep(0.5).phi(0.0) == doctest::Approx(2.0));
  CHECK(std::isinf(make_Ep(0.0).phi(0.0)));
  CHECK(std::isinf(make_Ep(-1.0).phi(0.0)));
  // logarithmic branch: E_1(e) = e*1 - e + 1 = 1
  CHECK(make_Ep(1.0).phi(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-13));
  // quadratic branch: E_2 = (rho-1)^2 / 2
  for (double rho : {0.0, 0.4, 1.7, 3.0})
    CHECK(make_Ep(2.0).phi(rho) ==
          doctest::Approx(0.5 * (rho - 1.0) * (rho - 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(make_Ep(2.0).phi(-0.1), std::invalid_argument);
}

TEST_CASE("entropy densities are cancellation-safe near rho = 1") {
  for (double p : {-1.0, 0.0, 0.5, 1.0, 3.0}) {
    EntropyDensity E = make_Ep(p);
    for (double x : {1e-5, -1e-5, 1e-8, -1e-8}) {
      double expected = 0.5 * x * x;  // phi''(1) = 1 for every p
      CHECK(E.phi(1.0 + x) == doctest::Approx(expected).epsilon(1e-3));
    }
  }
}

TEST_CASE("two-sided entropies: branch selection and C^2 matching") {
  EntropyDensity pq = make_phi_pq(0.5, -1.0);
  CHECK(pq.phi(0.25) == doctest::Approx(make_Ep(0.5).phi(0.25)).epsilon(1e-14));
  CHECK(pq.phi(4.0) == doctest::Approx(make_Ep(-1.0).phi(4.0)).epsilon(1e-14));
  CHECK(std::abs(pq.phi(1.0)) <= 1e-15);
  CHECK(pq.d2phi(1.0) == doctest::Approx(1.0));
  // E_{-1}(rho) = (rho-1)^2 / (2 rho)
  CHECK(pq.phi(4.0) == doctest::Approx(9.0 / 8.0).epsilon(1e-13));

  // m-adapted entropy: p_m = max(1/2, m-1), q_m = min(1/2, 2-m)
  EntropyDensity m15 = make_phi_m(1.5);
  CHECK(m15.phi(0.3) == doctest::Approx(make_Ep(0.5).phi(0.3)).epsilon(1e-14));
  CHECK(m15.phi(3.0) == doctest::Approx(make_Ep(0.5).phi(3.0)).epsilon(1e-14));
  EntropyDensity m2 = make_phi_m(2.0);
  CHECK(m2.phi(0.3) == doctest::Approx(make_Ep(1.0).phi(0.3)).epsilon(1e-14));
  CHECK(m2.phi(3.0) == doctest::Approx(make_Ep(0.0).phi(3.0)).epsilon(1e-14));
  EntropyDensity m3 = make_phi_m(3.0);
  CHECK(m3.phi(0.3) == doctest::Approx(make_Ep(2.0).phi(0.3)).epsilon(1e-14));
  CHECK(m3.phi(3.0) == doctest::Approx(make_Ep(-1.0).phi(3.0)).epsilon(1e-14));
}

TEST_CASE("entropy inequality ratios stay below one for the admissible entropies") {
  std::vector<double> grid = logspace(1e-3, 1e3, 2000);  // even count avoids rho = 1 exactly
  double tol = 1.0 + 1e-9;

  CHECK(entropy_inequality_check(make_phi_pq(0.5, -1.0), InequalityMode::CA, 0.0, grid) <= tol);
  for (double m : {1.5, 2.0, 3.0})
    CHECK(entropy_inequality_check(make_phi_m(m), InequalityMode::PME, m, grid) <= tol);
  // m = 1: the nonlinearity factor (rho^0 - 1)^2 vanishes identically
  CHECK(entropy_inequality_check(make_phi_m(1.0), InequalityMode::PME, 1.0, grid) == 0.0);
  // the plain quadratic entropy violates the CA inequality at large rho
  CHECK(entropy_inequality_check(make_Ep(2.0), InequalityMode::CA, 0.0, grid) > 1.5);
  CHECK_THROWS_AS(
      entropy_inequality_check(make_Ep(2.0), InequalityMode::CA, 0.0, std::vector<double>{1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      entropy_inequality_check(make_Ep(2.0), InequalityMode::CA, 0.0, std::vector<double>{-2.0}),
      std::invalid_argument);
}

TEST_CASE("relative entropy and Hellinger distance quadratures") {
  Grid grid(4.0, 1601);
  int n = grid.n_points;
  VectorXd ones = VectorXd::Ones(n);

  VectorXd u = ones;
  for (int i = 0; i < n; ++i)
    if (std::abs(grid.node(i)) < 0.5) u(i) = 2.0;
  // unit-height indicator bump of width 1 against U = 1: H_{E_2} = 1/2
  CHECK(relative_entropy(u, ones, make_Ep(2.0), grid) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(relative_entropy(ones, ones, make_Ep(2.0), grid) == 0.0);

  VectorXd u4 = ones;
  for (int i = 0; i < n; ++i)
    if (std::abs(grid.node(i)) < 0.5) u4(i) = 4.0;
  CHECK(hellinger(u4, ones, grid) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(hellinger(ones, ones, grid) == 0.0);

  // infinite quotient entropy is reported as +inf, not an exception
  VectorXd uz = ones;
  uz(3) = 0.0;
  CHECK(std::isinf(relative_entropy(uz, ones, make_Ep(-1.0), grid)));

  CHECK_THROWS_AS(relative_entropy(u, VectorXd::Zero(n), make_Ep(2.0), grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(hellinger(-u, ones, grid), std::invalid_argument);
  CHECK_THROWS_AS(hellinger(u, ones, Grid(4.0, 801)), std::invalid_argument);
}

TEST_CASE("Hellinger distance is dominated by the m-adapted relative entropy") {
  for (double m : {1.0, 1.5, 2.0, 3.0}) {
    EntropyDensity phi = make_phi_m(m);
    double Chat = 0.0;
    for (double rho : logspace(1e-3, 1e3, 4001)) {
      double num = (std::sqrt(rho) - 1.0) * (std::sqrt(rho) - 1.0);
      Chat = std::max(Chat, num / phi.phi(rho));
    }
    CHECK(std::isfinite(Chat));

    Grid grid(3.0, 401);
    int n = grid.n_points;
    VectorXd u(n), U(n);
    for (int i = 0; i < n; ++i) {
      double y = grid.node(i);
      U(i) = 1.0 + 0.5 * std::tanh(y);
      u(i) = U(i) * (1.0 + 0.8 * std::sin(3.0 * y));
    }
    double H = relative_entropy(u, U, phi, grid);
    CHECK(hellinger(u, U, grid) <= Chat * H + 1e-12);
  }
}

TEST_CASE("decay rate fit recovers exact exponential rates") {
  std::vector<double> tau, H;
  for (int i = 0; i < 40; ++i) {
    double t = 0.15 * i;
    tau.push_back(t);
    H.push_back(3.0 * std::exp(-0.5 * t));
  }
  DecayFit fit = decay_rate_fit(tau, H);
  CHECK(fit.lambda == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);

  std::vector<double> H2;
  for (double t : tau) H2.push_back(std::exp(-0.7 * t) * (1.0 + 0.01 * std::sin(5.0 * t)));
  fit = decay_rate_fit(tau, H2);
  CHECK(fit.lambda == doctest::Approx(0.7).epsilon(0.02));
  CHECK(fit.residual > 0.0);

  CHECK_THROWS_AS(decay_rate_fit({0, 1, 2}, {1, 1, 1}), std::invalid_argument);
  std::vector<double> bad = H;
  bad[5] = 0.0;
  CHECK_THROWS_AS(decay_rate_fit(tau, bad), std::invalid_argument);
}

TEST_CASE("semi-implicit step: stationarity, range preservation, guards") {
  Grid grid(8.0, 801);
  Profile oracle = closed_form_oracle(OracleId::Linear, grid);
  ScalarFluxMap A = linear_flux(1.0);

  EvolutionState s;
  s.grid = grid;
  s.u = VectorXd(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) s.u(i) = oracle.U[static_cast<size_t>(i)](0);
  VectorXd u0 = s.u;

  double dt = suggested_dt(s, A);
  CHECK(dt == doctest::Approx(0.25 * grid.spacing * grid.spacing));

  bool clipped = false;
  double max_dev = 0.0;
  for (int step = 0; step < 300; ++step) {
    bool c = false;
    s = step_pde(s, A, dt, &c);
    clipped = clipped || c;
    max_dev = std::max(max_dev, (s.u - u0).lpNorm<Eigen::Infinity>());
  }
  // the exact profile is a near-fixed point; deviation is the O(h) scheme bias
  CHECK(max_dev <= 5e-3);
  CHECK(!clipped);
  // discrete maximum principle: data in [0, 1] stays there
  CHECK(s.u.minCoeff() >= -1e-12);
  CHECK(s.u.maxCoeff() <= 1.0 + 1e-12);

  CHECK_THROWS_AS(step_pde(s, A, 0.0), std::invalid_argument);
  EvolutionState wrong = s;
  wrong.u = VectorXd::Ones(11);
  CHECK_THROWS_AS(step_pde(wrong, A, dt), std::invalid_argument);
}

TEST_CASE("semi-implicit step: bump perturbations decay toward the profile") {
  Grid grid(8.0, 801);
  Profile oracle = closed_form_oracle(OracleId::Linear, grid);
  ScalarFluxMap A = linear_flux(1.0);

  EvolutionState s;
  s.grid = grid;
  s.u = VectorXd(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    double y = grid.node(i);
    s.u(i) = oracle.U[static_cast<size_t>(i)](0) + 0.05 * bump(y, 0.0, 2.0);
  }
  VectorXd U = s.u - s.u;  // reference: exact oracle values
  for (int i = 0; i < grid.n_points; ++i) U(i) = oracle.U[static_cast<size_t>(i)](0);

  double d0 = (s.u - U).lpNorm<Eigen::Infinity>();
  double dt = suggested_dt(s, A);
  while (s.tau < 2.0) s = step_pde(s, A, dt);
  double d1 = (s.u - U).lpNorm<Eigen::Infinity>();
  CHECK(d1 < 0.5 * d0);
}

TEST_CASE("drift-only transport contracts bump centers toward the origin") {
  Grid grid(8.0, 1601);
  ScalarFluxMap zero_flux;
  zero_flux.A = [](double) { return 0.0; };
  zero_flux.dA = [](double) { return 0.0; };

  EvolutionState s;
  s.grid = grid;
  s.u = VectorXd(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) s.u(i) = bump(grid.node(i), 2.0, 1.0);
  double peak0 = s.u.maxCoeff();

  double dt = suggested_dt(s, zero_flux);
  CHECK(dt == doctest::Approx(0.5 * grid.spacing / (0.5 * grid.half_width)));
  while (s.tau < 0.5) s = step_pde(s, zero_flux, dt);

  int argmax = 0;
  s.u.maxCoeff(&argmax);
  double predicted = 2.0 * std::exp(-0.25);  // characteristics y(tau) = y0 e^{-tau/2}
  CHECK(std::abs(grid.node(argmax) - predicted) <= 4.0 * grid.spacing);
  CHECK(s.u.maxCoeff() <= peak0 + 1e-9);  // upwind transport is dissipative

  // an unstable step is rejected rather than silently blowing up
  EvolutionState fresh;
  fresh.grid = grid;
  fresh.u = VectorXd(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) fresh.u(i) = bump(grid.node(i), 2.0, 1.0);
  CHECK_THROWS_AS(step_pde(fresh, zero_flux, 50.0), std::runtime_error);
}

TEST_CASE("sigma checks: flat profiles, solved PME profile, linear exemption") {
  Grid grid(6.0, 1201);
  Profile flat = scalar_profile_from(grid, 1.0, 1.0, [](double) { return 1.0; });
  SigmaReport lip = sigma_check_lipschitz(flat, 1.0, 1.0);
  CHECK(lip.Sigma == 0.0);
  CHECK(lip.Lambda_predicted == doctest::Approx(0.5));
  CHECK(lip.hypothesis_ok);
  SigmaReport pme_flat = sigma_check_pme(flat, 2.0);
  CHECK(pme_flat.Sigma == 0.0);
  CHECK(pme_flat.Lambda_predicted == doctest::Approx(0.5));
  CHECK(pme_flat.hypothesis_ok);

  // porous-medium profile with m = 2 between 1 and 1.2
  ScalarDiffusivity D = make_scalar_diffusivity([](double u) { return 2.0 * u; }, 1.0, 1.2);
  ScalarSolveConfig cfg;
  cfg.grid = default_grid(D.D_sup, 1401);
  auto [prof, rep] = solve_scalar(D, 1.0, 1.2, cfg);
  SigmaReport pme = sigma_check_pme(prof, 2.0);
  CHECK(pme.Sigma <= 0.003);  // sufficient bound: U_+^{m-1} (U_+ - U_-)^2 / (8 m U_-^m)
  CHECK(pme.hypothesis_ok);
  CHECK(pme.Lambda_predicted == doctest::Approx(0.5 * (1.0 - 2.0 * pme.Sigma)));
  CHECK(pme.Lambda_predicted >= 0.497);

  // m = 1 carries no restriction regardless of the profile
  SigmaReport m1 = sigma_check_pme(prof, 1.0);
  CHECK(m1.hypothesis_ok);
  CHECK(m1.Lambda_predicted == doctest::Approx(0.5));

  Profile zeroprof = scalar_profile_from(grid, 0.0, 0.0, [](double) { return 0.0; });
  CHECK_THROWS_AS(sigma_check_pme(zeroprof, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(sigma_check_lipschitz(flat, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("eigenfunction residuals vanish at second order on the linear profile") {
  ScalarFluxMap A = linear_flux(1.0);
  std::vector<int> ns = {501, 1001, 2001};
  std::vector<double> hs, r1s, r2s;
  for (int n : ns) {
    Grid grid(11.0, n);
    Profile prof = closed_form_oracle(OracleId::Linear, grid);
    auto [r1, r2] = eigen_residuals(prof, A);
    hs.push_back(std::log(grid.spacing));
    r1s.push_back(std::log(r1));
    r2s.push_back(std::log(r2));
  }
  CHECK(std::exp(r1s.back()) <= 1e-4);
  CHECK(std::exp(r2s.back()) <= 1e-4);
  CHECK(fit_slope(hs, r1s) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(fit_slope(hs, r2s) == doctest::Approx(2.0).epsilon(0.15));

  bool applicable = true;
  Profile flat = scalar_profile_from(Grid(5.0, 201), 1.0, 1.0, [](double) { return 1.0; });
  auto [f1, f2] = eigen_residuals(flat, A, &applicable);
  CHECK(!applicable);
  CHECK(f1 == 0.0);
  CHECK(f2 == 0.0);
}

TEST_CASE("linearized operator matches its formal adjoint on compact bumps") {
  Grid grid(8.0, 1601);
  Profile prof = closed_form_oracle(OracleId::Linear, grid);
  ScalarFluxMap A = linear_flux(1.0);
  int n = grid.n_points;
  double h = grid.spacing;

  VectorXd v(n), w(n);
  for (int i = 0; i < n; ++i) {
    v(i) = bump(grid.node(i), -1.0, 2.5);
    w(i) = bump(grid.node(i), 1.0, 2.5);
  }
  VectorXd Lv = linearized_apply(prof, A, v);

  // L* w = A'(U) w'' - (w/2 + (y/2) w') by the same centered differences
  VectorXd Lsw = VectorXd::Zero(n);
  for (int i = 1; i < n - 1; ++i) {
    double y = grid.node(i);
    double wpp = (w(i + 1) - 2.0 * w(i) + w(i - 1)) / (h * h);
    double wp = (w(i + 1) - w(i - 1)) / (2.0 * h);
    Lsw(i) = A.dA(prof.U[static_cast<size_t>(i)](0)) * wpp - (0.5 * w(i) + 0.5 * y * wp);
  }

  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < n; ++i) {
    lhs += Lv(i) * w(i) * h;
    rhs += v(i) * Lsw(i) * h;
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-3));
  CHECK(std::abs(lhs) > 1e-4);  // the pairing is not trivially zero
}

TEST_CASE("moment identities hold along simulated trajectories") {
  ScalarFluxMap A = linear_flux(1.0);
  Grid grid = default_grid(1.0, 1001);
  Profile oracle = closed_form_oracle(OracleId::Linear, grid);
  BoundaryPair bnd = oracle.boundary;

  // stationary trajectory: residuals reduce to quadrature error of the moments
  std::vector<EvolutionState> stat;
  for (int k = 0; k < 5; ++k) {
    EvolutionState st;
    st.grid = grid;
    st.tau = 0.01 * k;
    st.u = VectorXd(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) st.u(i) = oracle.U[static_cast<size_t>(i)](0);
    stat.push_back(st);
  }
  MomentResiduals mr = moment_odes_check(stat, A, bnd);
  CHECK(mr.residual0 <= 1e-4);
  CHECK(mr.residual1 <= 1e-4);

  // perturbed start: finite-difference residuals at the scheme's accuracy
  EvolutionState s;
  s.grid = grid;
  s.u = VectorXd(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    double y = grid.node(i);
    s.u(i) = oracle.U[static_cast<size_t>(i)](0) + 0.1 * bump(y, 0.0, 2.0);
  }
  TrajectoryRecord rec = evolve(s, A, 2.0, 50);
  MomentResiduals pr = moment_odes_check(rec.states, A, bnd);
  CHECK(pr.residual0 <= 5e-3);
  CHECK(pr.residual1 <= 2e-2);  // first moment sees the O(h) upwind drift bias

  // the zeroth moment decays at rate 1/2
  std::vector<double> tau, m0;
  for (const auto& st : rec.states) {
    VectorXd f(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i)
      f(i) = st.u(i) - bnd.step(grid.node(i))(0);
    double v = 0.5 * (f(0) + f(grid.n_points - 1));
    for (int i = 1; i + 1 < grid.n_points; ++i) v += f(i);
    v *= grid.spacing;
    if (st.tau >= 0.1) {
      tau.push_back(st.tau);
      m0.push_back(v);
    }
  }
  DecayFit fit = decay_rate_fit(tau, m0);
  CHECK(fit.lambda == doctest::Approx(0.5).epsilon(0.04));

  CHECK_THROWS_AS(moment_odes_check({s, s}, A, bnd), std::invalid_argument);
}

TEST_CASE("relative entropy decays along the linear-diffusion flow") {
  // exact profile for boundary data (1, 2): 1 + Phi(y), Phi the erf profile
  ScalarFluxMap A = linear_flux(1.0);
  Grid grid(8.0, 1001);
  Profile oracle = closed_form_oracle(OracleId::Linear, grid);
  int n = grid.n_points;
  VectorXd U(n);
  for (int i = 0; i < n; ++i) U(i) = 1.0 + oracle.U[static_cast<size_t>(i)](0);

  EvolutionState s;
  s.grid = grid;
  s.u = VectorXd(n);
  for (int i = 0; i < n; ++i) s.u(i) = U(i) * (1.0 + 0.2 * bump(grid.node(i), 0.0, 2.0));

  EntropyDensity phi = make_phi_pq(0.5, -1.0);
  EntropyDensity phi1 = make_phi_m(1.0);  // = E_{1/2} = 2 (sqrt(rho) - 1)^2
  TrajectoryRecord rec = evolve(s, A, 6.0, 200);

  std::vector<double> tau, H;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& st : rec.states) {
    double Hs = relative_entropy(st.u, U, phi, grid);
    CHECK(Hs <= prev * (1.0 + 1e-10));  // monotone decay of the entropy
    prev = Hs;
    // Hellinger-entropy ordering with the exact constant 1/2 for E_{1/2}
    double Hm = relative_entropy(st.u, U, phi1, grid);
    CHECK(hellinger(st.u, U, grid) <= 0.5 * Hm + 1e-12);
    if (st.tau >= 1.0 && st.tau <= 6.0) {
      tau.push_back(st.tau);
      H.push_back(Hs);
    }
  }
  DecayFit fit = decay_rate_fit(tau, H);
  // theorem guarantee: at least e^{-tau/2}
  CHECK(fit.lambda >= 0.5 - 0.02);
  MESSAGE("linear entropy decay rate: ", fit.lambda);
}

TEST_CASE("relative entropy decays along the porous-medium flow") {
  ScalarDiffusivity D = make_scalar_diffusivity([](double u) { return 2.0 * u; }, 1.0, 1.2);
  ScalarSolveConfig cfg;
  cfg.grid = default_grid(D.D_sup, 1201);
  auto [prof, rep] = solve_scalar(D, 1.0, 1.2, cfg);
  SigmaReport sig = sigma_check_pme(prof, 2.0);
  REQUIRE(sig.hypothesis_ok);

  ScalarFluxMap A = pme_flux(2.0);
  const Grid& grid = cfg.grid;
  int n = grid.n_points;
  VectorXd U(n);
  for (int i = 0; i < n; ++i) U(i) = prof.U[static_cast<size_t>(i)](0);

  EvolutionState s;
  s.grid = grid;
  s.u = VectorXd(n);
  for (int i = 0; i < n; ++i) s.u(i) = U(i) * (1.0 + 0.2 * bump(grid.node(i), 0.0, 2.0));

  EntropyDensity phi = make_phi_m(2.0);
  TrajectoryRecord rec = evolve(s, A, 4.0, 200);
  std::vector<double> tau, H;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& st : rec.states) {
    double Hs = relative_entropy(st.u, U, phi, grid);
    CHECK(Hs <= prev * (1.0 + 1e-10));
    prev = Hs;
    if (st.tau >= 0.5) {
      tau.push_back(st.tau);
      H.push_back(Hs);
    }
  }
  DecayFit fit = decay_rate_fit(tau, H);
  CHECK(fit.lambda >= sig.Lambda_predicted - 0.02);
  MESSAGE("porous-medium entropy decay rate: ", fit.lambda);
}
