#include "simprof/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace simprof {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (rho^p - p rho + p - 1) / (p (p-1)) evaluated without catastrophic
// cancellation near rho = 1: numerator = expm1(p log1p(x)) - p x with
// x = rho - 1, both terms O(x), difference O(x^2) but computed from the
// accurately-rounded expm1.
double Ep_value(double p, double rho) {
  if (rho < 0.0) throw std::invalid_argument("entropy density: negative argument");
  if (rho == 0.0) {
    if (p > 0.0) return 1.0 / p;
    return kInf;
  }
  double x = rho - 1.0;
  if (p == 1.0) return rho * std::log1p(x) - x;
  if (p == 0.0) return x - std::log1p(x);
  return (std::expm1(p * std::log1p(x)) - p * x) / (p * (p - 1.0));
}

double Ep_deriv(double p, double rho) {
  if (p == 1.0) return std::log(rho);
  if (p == 0.0) return 1.0 - 1.0 / rho;
  return (std::pow(rho, p - 1.0) - 1.0) / (p - 1.0);
}

double Ep_second(double p, double rho) { return std::pow(rho, p - 2.0); }

double trapz(const VectorXd& f, double h) {
  double s = 0.5 * (f(0) + f(f.size() - 1));
  for (int i = 1; i + 1 < f.size(); ++i) s += f(i);
  return s * h;
}

// Thomas algorithm for a tridiagonal system; overwrites its inputs.
VectorXd solve_tridiagonal(VectorXd lower, VectorXd diag, VectorXd upper, VectorXd rhs) {
  int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    double w = lower(i) / diag(i - 1);
    diag(i) -= w * upper(i - 1);
    rhs(i) -= w * rhs(i - 1);
  }
  VectorXd x(n);
  x(n - 1) = rhs(n - 1) / diag(n - 1);
  for (int i = n - 2; i >= 0; --i) x(i) = (rhs(i) - upper(i) * x(i + 1)) / diag(i);
  return x;
}

}  // namespace

EntropyDensity make_Ep(double p) {
  EntropyDensity e;
  e.label = "E_p(" + std::to_string(p) + ")";
  e.phi = [p](double rho) { return Ep_value(p, rho); };
  e.dphi = [p](double rho) { return Ep_deriv(p, rho); };
  e.d2phi = [p](double rho) { return Ep_second(p, rho); };
  return e;
}

EntropyDensity make_phi_pq(double p, double q) {
  EntropyDensity e;
  e.label = "phi_pq(" + std::to_string(p) + "," + std::to_string(q) + ")";
  e.phi = [p, q](double rho) { return rho <= 1.0 ? Ep_value(p, rho) : Ep_value(q, rho); };
  e.dphi = [p, q](double rho) { return rho <= 1.0 ? Ep_deriv(p, rho) : Ep_deriv(q, rho); };
  e.d2phi = [p, q](double rho) { return rho <= 1.0 ? Ep_second(p, rho) : Ep_second(q, rho); };
  return e;
}

EntropyDensity make_phi_m(double m) {
  double p = std::max(0.5, m - 1.0);
  double q = std::min(0.5, 2.0 - m);
  EntropyDensity e = make_phi_pq(p, q);
  e.label = "phi_m(" + std::to_string(m) + ")";
  return e;
}

ScalarFluxMap linear_flux(double d) {
  ScalarFluxMap f;
  f.A = [d](double u) { return d * u; };
  f.dA = [d](double) { return d; };
  return f;
}

ScalarFluxMap pme_flux(double m) {
  ScalarFluxMap f;
  f.A = [m](double u) { return std::pow(std::max(u, 0.0), m); };
  f.dA = [m](double u) { return m * std::pow(std::max(u, 0.0), m - 1.0); };
  return f;
}

double suggested_dt(const EvolutionState& state, const ScalarFluxMap& A) {
  double h = state.grid.spacing;
  double amax = 0.0;
  for (int i = 0; i < state.u.size(); ++i) amax = std::max(amax, A.dA(state.u(i)));
  double dt_diff = amax > 0.0 ? 0.25 * h * h / amax : kInf;
  double dt_drift = 0.5 * h / (0.5 * state.grid.half_width);
  return std::min(dt_diff, dt_drift);
}

EvolutionState step_pde(const EvolutionState& state, const ScalarFluxMap& A, double dt,
                        bool* clipped) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_pde: dt must be positive");
  const Grid& grid = state.grid;
  int n = grid.n_points;
  if (state.u.size() != n) throw std::invalid_argument("step_pde: state dimension mismatch");
  double h = grid.spacing;
  double r = dt / (h * h);

  VectorXd Au(n), a(n);
  for (int i = 0; i < n; ++i) {
    Au(i) = A.A(state.u(i));
    a(i) = A.dA(state.u(i));
  }

  // rhs = dt * [ (A(u))_yy + (y/2) u_y ] with upwind drift toward y = 0,
  // unknown is the increment delta with Dirichlet zeros at the ends.
  VectorXd lower = VectorXd::Zero(n), diag = VectorXd::Ones(n), upper = VectorXd::Zero(n);
  VectorXd rhs = VectorXd::Zero(n);
  for (int i = 1; i < n - 1; ++i) {
    double y = grid.node(i);
    double drift;
    if (y > 0.0)
      drift = 0.5 * y * (state.u(i + 1) - state.u(i)) / h;
    else if (y < 0.0)
      drift = 0.5 * y * (state.u(i) - state.u(i - 1)) / h;
    else
      drift = 0.0;
    rhs(i) = r * (Au(i + 1) - 2.0 * Au(i) + Au(i - 1)) + dt * drift;
    lower(i) = -r * a(i - 1);
    diag(i) = 1.0 + 2.0 * r * a(i);
    upper(i) = -r * a(i + 1);
  }
  VectorXd delta = solve_tridiagonal(lower, diag, upper, rhs);

  EvolutionState out;
  out.grid = grid;
  out.tau = state.tau + dt;
  out.u = state.u + delta;
  out.u(0) = state.u(0);
  out.u(n - 1) = state.u(n - 1);

  bool did_clip = false;
  for (int i = 0; i < n; ++i)
    if (out.u(i) < 0.0) {
      out.u(i) = 0.0;
      did_clip = true;
    }
  if (clipped) *clipped = did_clip;

  double lo = state.u.minCoeff();
  double hi = state.u.maxCoeff();
  double margin = 0.1 * std::max(hi - lo, std::max(std::abs(hi), 1.0));
  if (out.u.maxCoeff() > hi + margin || out.u.minCoeff() < lo - margin)
    throw std::runtime_error("step_pde: stability violation, solution left the admissible range");
  return out;
}

double relative_entropy(const VectorXd& u, const VectorXd& U, const EntropyDensity& phi,
                        const Grid& grid) {
  if (u.size() != U.size() || u.size() != grid.n_points)
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  VectorXd f(u.size());
  for (int i = 0; i < u.size(); ++i) {
    if (!(U(i) > 0.0)) throw std::invalid_argument("relative_entropy: reference must be positive");
    double v = phi.phi(u(i) / U(i)) * U(i);
    if (!std::isfinite(v)) return kInf;
    f(i) = v;
  }
  return trapz(f, grid.spacing);
}

double hellinger(const VectorXd& u, const VectorXd& U, const Grid& grid) {
  if (u.size() != U.size() || u.size() != grid.n_points)
    throw std::invalid_argument("hellinger: dimension mismatch");
  VectorXd f(u.size());
  for (int i = 0; i < u.size(); ++i) {
    if (u(i) < 0.0 || U(i) < 0.0)
      throw std::invalid_argument("hellinger: arguments must be nonnegative");
    double d = std::sqrt(u(i)) - std::sqrt(U(i));
    f(i) = d * d;
  }
  return trapz(f, grid.spacing);
}

DecayFit decay_rate_fit(const std::vector<double>& tau, const std::vector<double>& H) {
  if (tau.size() != H.size() || tau.size() < 10)
    throw std::invalid_argument("decay_rate_fit: need at least 10 samples");
  size_t n = tau.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> logH(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(H[i] > 0.0)) throw std::invalid_argument("decay_rate_fit: entropies must be positive");
    logH[i] = std::log(H[i]);
    sx += tau[i];
    sy += logH[i];
    sxx += tau[i] * tau[i];
    sxy += tau[i] * logH[i];
  }
  double nn = static_cast<double>(n);
  double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  double intercept = (sy - slope * sx) / nn;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double e = logH[i] - (intercept + slope * tau[i]);
    ss += e * e;
  }
  DecayFit out;
  out.lambda = -slope;
  out.residual = std::sqrt(ss / nn);
  return out;
}

namespace {

double sup_sigma(const Profile& U_profile, double m_exponent, bool with_power) {
  const Grid& grid = U_profile.grid;
  int n = grid.n_points;
  double h = grid.spacing;
  double sigma = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    double up = (U_profile.U[static_cast<size_t>(i + 1)](0) -
                 U_profile.U[static_cast<size_t>(i - 1)](0)) /
                (2.0 * h);
    double val = up * up;
    if (with_power) {
      double u = U_profile.U[static_cast<size_t>(i)](0);
      if (!(u > 0.0)) throw std::invalid_argument("sigma_check: profile touches zero");
      val *= std::pow(u, m_exponent - 2.0);
    }
    sigma = std::max(sigma, val);
  }
  return sigma;
}

}  // namespace

SigmaReport sigma_check_lipschitz(const Profile& U_profile, double C_A, double a_lo) {
  if (!(a_lo > 0.0)) throw std::invalid_argument("sigma_check: a_lo must be positive");
  SigmaReport out;
  out.Sigma = sup_sigma(U_profile, 0.0, false);
  out.Lambda_predicted = 0.5 * (1.0 - C_A * C_A * out.Sigma / a_lo);
  out.hypothesis_ok = out.Lambda_predicted > 0.0;
  return out;
}

SigmaReport sigma_check_pme(const Profile& U_profile, double m) {
  SigmaReport out;
  out.Sigma = sup_sigma(U_profile, m, true);
  double cap = m * (m - 1.0) * (m - 1.0);
  out.Lambda_predicted = 0.5 * (1.0 - cap * out.Sigma);
  out.hypothesis_ok = (cap == 0.0) || (out.Sigma < 1.0 / cap);
  return out;
}

double entropy_inequality_check(const EntropyDensity& phi, InequalityMode mode, double m,
                                const std::vector<double>& rho_grid) {
  auto ratio = [&](double rho) -> double {
    double lhs, rhs;
    if (mode == InequalityMode::CA) {
      lhs = phi.d2phi(rho) * rho * rho * (rho - 1.0) * (rho - 1.0);
      rhs = 2.0 * phi.phi(rho);
    } else {
      double g = std::pow(rho, m - 1.0) - 1.0;
      lhs = phi.d2phi(rho) * m * g * g / (4.0 * std::pow(rho, m - 3.0));
      rhs = 0.5 * m * (m - 1.0) * (m - 1.0) * phi.phi(rho);
    }
    if (lhs == 0.0) return 0.0;
    if (!(rhs > 0.0)) return kInf;
    return lhs / rhs;
  };
  double worst = 0.0;
  for (double rho : rho_grid) {
    if (rho <= 0.0 || rho == 1.0)
      throw std::invalid_argument("entropy_inequality_check: samples must lie in (0,inf)\\{1}");
    worst = std::max(worst, ratio(rho));
  }
  // one-sided limits at rho = 1 (cancellation-safe entropy evaluation keeps
  // the quotient meaningful this close to the equality point)
  worst = std::max(worst, ratio(1.0 - 1e-5));
  worst = std::max(worst, ratio(1.0 + 1e-5));
  return worst;
}

VectorXd linearized_apply(const Profile& U_profile, const ScalarFluxMap& A, const VectorXd& v) {
  const Grid& grid = U_profile.grid;
  int n = grid.n_points;
  if (v.size() != n) throw std::invalid_argument("linearized_apply: dimension mismatch");
  double h = grid.spacing;
  VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = A.dA(U_profile.U[static_cast<size_t>(i)](0)) * v(i);
  VectorXd out = VectorXd::Zero(n);
  for (int i = 1; i < n - 1; ++i) {
    double second = (w(i + 1) - 2.0 * w(i) + w(i - 1)) / (h * h);
    double first = (v(i + 1) - v(i - 1)) / (2.0 * h);
    out(i) = second + 0.5 * grid.node(i) * first;
  }
  return out;
}

std::pair<double, double> eigen_residuals(const Profile& U_profile, const ScalarFluxMap& A,
                                          bool* applicable) {
  const Grid& grid = U_profile.grid;
  int n = grid.n_points;
  double h = grid.spacing;
  VectorXd up(n);
  up(0) = 0.0;
  up(n - 1) = 0.0;
  for (int i = 1; i < n - 1; ++i)
    up(i) = (U_profile.U[static_cast<size_t>(i + 1)](0) -
             U_profile.U[static_cast<size_t>(i - 1)](0)) /
            (2.0 * h);
  double up_max = up.lpNorm<Eigen::Infinity>();
  if (up_max <= 1e-14) {
    if (applicable) *applicable = false;
    return {0.0, 0.0};
  }
  if (applicable) *applicable = true;

  VectorXd yup(n);
  for (int i = 0; i < n; ++i) yup(i) = grid.node(i) * up(i);
  double yup_max = yup.lpNorm<Eigen::Infinity>();

  VectorXd L1 = linearized_apply(U_profile, A, up);
  VectorXd L2 = linearized_apply(U_profile, A, yup);
  double r1 = 0.0, r2 = 0.0;
  for (int i = 2; i < n - 2; ++i) {
    if (std::abs(up(i)) > 1e-8 * up_max) r1 = std::max(r1, std::abs(L1(i) + 0.5 * up(i)));
    if (std::abs(yup(i)) > 1e-8 * yup_max) r2 = std::max(r2, std::abs(L2(i) + yup(i)));
  }
  return {r1 / up_max, r2 / yup_max};
}

MomentResiduals moment_odes_check(const std::vector<EvolutionState>& trajectory,
                                  const ScalarFluxMap& A, const BoundaryPair& boundary) {
  if (trajectory.size() < 3)
    throw std::invalid_argument("moment_odes_check: need at least three states");
  const Grid& grid = trajectory.front().grid;
  int n = grid.n_points;
  double h = grid.spacing;
  double ajump = A.A(boundary.U_plus(0)) - A.A(boundary.U_minus(0));

  size_t T = trajectory.size();
  std::vector<double> m0(T), m1(T), tau(T);
  for (size_t t = 0; t < T; ++t) {
    VectorXd f0(n), f1(n);
    for (int i = 0; i < n; ++i) {
      double y = grid.node(i);
      double dev = trajectory[t].u(i) - boundary.step(y)(0);
      f0(i) = dev;
      f1(i) = -y * dev;  // Int y (step - u)
    }
    m0[t] = trapz(f0, h);
    m1[t] = trapz(f1, h);
    tau[t] = trajectory[t].tau;
  }

  MomentResiduals out;
  for (size_t t = 1; t + 1 < T; ++t) {
    double dtau = tau[t + 1] - tau[t - 1];
    double d0 = (m0[t + 1] - m0[t - 1]) / dtau;
    double d1 = (m1[t + 1] - m1[t - 1]) / dtau;
    out.residual0 = std::max(out.residual0, std::abs(d0 + 0.5 * m0[t]));
    out.residual1 = std::max(out.residual1, std::abs(d1 + m1[t] - ajump));
  }
  return out;
}

}  // namespace simprof
