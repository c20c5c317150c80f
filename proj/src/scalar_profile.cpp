#include "simprof/scalar_profile.hpp"
#include <cstdio>
#include <cstdlib>

#include "simprof/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace simprof {

namespace {

constexpr double kQFloor = 1e-280;

struct ShootEnv {
  std::function<double(double)> D;  // already clamped to [U_-, U_+] and >= 0
  double eps = 0.0;
  double U_minus = 0.0;
  double U_plus = 1.0;
  double delta = 1.0;  // U_+ - U_-
  const Grid* grid = nullptr;
  int substeps = 8;

  double Deps(double u) const {
    double uc = std::clamp(u, U_minus, U_plus);
    return std::max(D(uc), 0.0) + eps;
  }
};

struct HalfResult {
  double U_end = 0.0;
  bool overshoot = false;   // crossed U_+ (right) by a margin
  bool undershoot = false;  // crossed U_- (left) by a margin
};

// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
double erfcx(double x) {
  if (x <= 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; relative error below 1e-14 for x > 25.
  double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(M_PI));
}

// Semi-analytic step for the stiff saturated regime. With D frozen over the
// step the flux decays as Q(y) = Q0 exp(-(y^2 - y0^2)/(4D)) and the U-gain
// has a closed form in erfcx; unconditionally stable and sign-preserving.
void exponential_step(double D, double& y, double h, double& U, double& Q, int sign) {
  double y0 = std::abs(y), y1 = std::abs(y + h);
  double sd = std::sqrt(D);
  double expo = -(y1 * y1 - y0 * y0) / (4.0 * D);
  double Q1 = (expo < -700.0) ? 0.0 : Q * std::exp(expo);
  double gain = std::sqrt(M_PI / D) * (Q * erfcx(y0 / (2.0 * sd)) - Q1 * erfcx(y1 / (2.0 * sd)));
  U += sign * gain;
  Q = Q1;
  if (Q < kQFloor) Q = 0.0;
  y += h;
}

// One step of U' = Q/D_eps(U), Q' = -(y/2) U' in direction sign(h).
// Classic RK4 off the stiff regime, exponential step (with a midpoint
// correction for the frozen D) when the flux-decay rate outruns RK4
// stability; subdivides whenever a step would move U by more than a
// hundredth of the range.
void rk4_step(const ShootEnv& env, double& y, double h, double& U, double& Q, int depth) {
  const int sign = (h >= 0.0) ? 1 : -1;
  const double D0 = env.Deps(U);
  const double rate = 0.5 * std::max(std::abs(y), std::abs(y + h)) * std::abs(h) / D0;
  const bool in_band = U <= env.U_plus + 1e-6 * env.delta && U >= env.U_minus - 1e-6 * env.delta;

  if (rate > 0.5) {
    double yt = y, Ut = U, Qt = Q;
    exponential_step(D0, yt, h, Ut, Qt, sign);
    if (in_band && depth < 48 && std::abs(Ut - U) > 0.01 * env.delta) {
      rk4_step(env, y, 0.5 * h, U, Q, depth + 1);
      rk4_step(env, y, 0.5 * h, U, Q, depth + 1);
      return;
    }
    // Midpoint correction: redo the step with D at the predicted midpoint.
    double Dm = env.Deps(0.5 * (U + Ut));
    exponential_step(Dm, y, h, U, Q, sign);
    return;
  }

  // Stage fluxes are floored at zero: Q >= 0 is exact for the continuous
  // system, and enforcing it per stage keeps U monotone along the
  // integration direction even when a step lands in the stiff layer.
  auto slope = [&](double yy, double u, double q, double& du, double& dq) {
    double up = std::max(q, 0.0) / env.Deps(u);
    du = up;
    dq = -0.5 * yy * up;
  };
  double k1u, k1q;
  slope(y, U, Q, k1u, k1q);
  if (in_band && depth < 48 && std::abs(k1u) * std::abs(h) > 0.01 * env.delta) {
    rk4_step(env, y, 0.5 * h, U, Q, depth + 1);
    rk4_step(env, y, 0.5 * h, U, Q, depth + 1);
    return;
  }
  double k2u, k2q, k3u, k3q, k4u, k4q;
  slope(y + 0.5 * h, U + 0.5 * h * k1u, Q + 0.5 * h * k1q, k2u, k2q);
  slope(y + 0.5 * h, U + 0.5 * h * k2u, Q + 0.5 * h * k2q, k3u, k3q);
  slope(y + h, U + h * k3u, Q + h * k3q, k4u, k4q);
  U += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  Q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  if (Q < kQFloor) Q = 0.0;
  y += h;
}

// Integrate from y = 0 outward in direction dir (+1 right, -1 left). When
// node arrays are given they cover center..end (right) or center..0 (left).
HalfResult integrate_half(const ShootEnv& env, int dir, double U0, double Q0,
                          std::vector<double>* U_nodes = nullptr,
                          std::vector<double>* Q_nodes = nullptr) {
  HalfResult res;
  const Grid& g = *env.grid;
  const int c = g.center_index();
  const double h_sub = dir * g.spacing / static_cast<double>(env.substeps);
  const double margin = 1e-6 * env.delta + 1e-300;
  double y = 0.0, U = U0, Q = Q0;
  if (U_nodes) {
    (*U_nodes)[static_cast<size_t>(c)] = U;
    (*Q_nodes)[static_cast<size_t>(c)] = Q;
  }
  const int cells = (g.n_points - 1) / 2;
  for (int cell = 0; cell < cells; ++cell) {
    for (int s = 0; s < env.substeps; ++s) {
      rk4_step(env, y, h_sub, U, Q, 0);
      if (U > env.U_plus + margin || U < env.U_minus - margin) break;
    }
    y = dir * g.spacing * static_cast<double>(cell + 1);  // re-anchor accumulated y
    int node = c + dir * (cell + 1);
    if (U_nodes) {
      (*U_nodes)[static_cast<size_t>(node)] = U;
      (*Q_nodes)[static_cast<size_t>(node)] = Q;
    }
    if (dir > 0 && U > env.U_plus + margin) {
      res.overshoot = true;
      break;
    }
    if (dir < 0 && U < env.U_minus - margin) {
      res.undershoot = true;
      break;
    }
  }
  res.U_end = U;
  return res;
}

// Largest non-overshooting Q0 with U(L) = U_+ (bisection); returns Q0 and the
// achieved right mismatch.
std::pair<double, double> inner_solve_q0(const ShootEnv& env, double U0, double q_lo_init,
                                         double q_hi_init, int max_iter) {
  auto f = [&](double q0) {
    HalfResult r = integrate_half(env, +1, U0, q0);
    if (r.overshoot) return 10.0 * env.delta;
    return r.U_end - env.U_plus;
  };
  double lo = std::max(q_lo_init, 0.0);
  double f_lo = f(lo);
  if (f_lo > 0.0) {
    lo = 0.0;
    f_lo = f(lo);
  }
  double hi = std::max(q_hi_init, 1e-12 * (1.0 + env.delta));
  double f_hi = f(hi);
  for (int k = 0; k < 80 && f_hi < 0.0; ++k) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = f(hi);
  }
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    double f_mid = f(mid);
    if (f_mid <= 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
    if (hi - lo < 1e-16 * (1.0 + hi)) break;
    if (std::abs(f_lo) < 1e-14 * env.delta) break;
  }
  return {lo, f_lo};
}

struct StageSolution {
  double U0 = 0.0;
  double Q0 = 0.0;
  double mismatch = 0.0;
  double bracket_width = 0.0;
};

StageSolution solve_stage(const ShootEnv& env, const Interval& u0_full, const Interval& q0_guess,
                          const StageSolution* warm, int max_iter, double shoot_tol) {
  const double tiny = 1e-12 * env.delta;
  double lo = u0_full.lo + tiny, hi = u0_full.hi - tiny;

  double q_hint_lo = q0_guess.lo, q_hint_hi = q0_guess.hi;
  auto g = [&](double u0, double* q0_out, double* right_mismatch) {
    auto [q0, fr] = inner_solve_q0(env, u0, 0.0, q_hint_hi, max_iter);
    if (q0_out) *q0_out = q0;
    if (right_mismatch) *right_mismatch = fr;
    HalfResult left = integrate_half(env, -1, u0, q0);
    if (left.undershoot) return -10.0 * env.delta;
    return left.U_end - env.U_minus;
  };

  // Warm bracket around the previous stage's solution, widened until the
  // signs straddle; fall back to the full interval.
  if (warm) {
    double w = std::max({1e-4 * env.delta, 8.0 * warm->bracket_width, 1e-12});
    for (int k = 0; k < 12; ++k) {
      double a = std::max(lo, warm->U0 - w), b = std::min(hi, warm->U0 + w);
      if (g(a, nullptr, nullptr) < 0.0 && g(b, nullptr, nullptr) > 0.0) {
        lo = a;
        hi = b;
        break;
      }
      w *= 4.0;
      if (a <= lo && b >= hi) break;
    }
  }

  StageSolution out;
  double best_u0 = 0.5 * (lo + hi), best_q0 = 0.0, best_mis = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    double q0 = 0.0, fr = 0.0;
    double gm = g(mid, &q0, &fr);
    double mis = std::max(std::abs(gm), std::abs(fr));
    if (mis < best_mis) {
      best_mis = mis;
      best_u0 = mid;
      best_q0 = q0;
    }
    if (gm <= 0.0)
      lo = mid;
    else
      hi = mid;
    if (mis < 0.05 * shoot_tol) break;
    if (hi - lo < 1e-15 * env.delta) break;
  }
  (void)q_hint_lo;
  out.U0 = best_u0;
  out.Q0 = best_q0;
  out.mismatch = best_mis;
  out.bracket_width = hi - lo;
  return out;
}

double inverse_cubic(double target) {
  // Inverse of y(u) = 1.5 u - 0.5 u^3 on [-1, 1].
  double t = std::clamp(target, -1.0, 1.0);
  double lo = -1.0, hi = 1.0, u = t;
  for (int it = 0; it < 100; ++it) {
    double f = 1.5 * u - 0.5 * u * u * u - t;
    if (f > 0.0)
      hi = u;
    else
      lo = u;
    double fp = 1.5 - 1.5 * u * u;
    double un = (fp > 1e-14) ? u - f / fp : 0.5 * (lo + hi);
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    if (std::abs(un - u) < 1e-16) {
      u = un;
      break;
    }
    u = un;
  }
  return u;
}

}  // namespace

std::pair<Interval, Interval> q0_u0_brackets(double D_star, double D_sup, double U_minus,
                                             double U_plus) {
  if (!(D_sup > 0.0)) throw std::invalid_argument("q0_u0_brackets: D_sup must be positive");
  double gamma = std::sqrt(std::max(D_star, 0.0) / (2.0 * D_sup));
  double delta = U_plus - U_minus;
  Interval u0{(U_minus + gamma * U_plus) / (1.0 + gamma),
              (gamma * U_minus + U_plus) / (1.0 + gamma)};
  Interval q0{std::sqrt(std::max(D_star, 0.0) / 16.0) * delta, std::sqrt(D_sup / 8.0) * delta};
  return {u0, q0};
}

std::pair<Profile, ScalarReport> solve_scalar(const ScalarDiffusivity& D, double U_minus,
                                              double U_plus, const ScalarSolveConfig& config) {
  if (U_minus > U_plus)
    throw std::invalid_argument("solve_scalar: requires U_- <= U_+ (reflect y -> -y otherwise)");
  const Grid& grid = config.grid;
  const int n = grid.n_points;
  Profile profile;
  profile.grid = grid;
  profile.boundary = BoundaryPair(U_minus, U_plus);
  profile.U.assign(static_cast<size_t>(n), VectorXd::Zero(1));
  profile.Q.assign(static_cast<size_t>(n), VectorXd::Zero(1));

  ScalarReport report;
  auto [u0b, q0b] = q0_u0_brackets(std::max(D.D_star, 0.0), std::max(D.D_sup, 1e-300), U_minus,
                                   U_plus);
  report.u0_bracket = u0b;
  report.q0_bracket = q0b;

  if (U_plus == U_minus) {
    for (int i = 0; i < n; ++i) profile.U[static_cast<size_t>(i)](0) = U_minus;
    report.U0 = U_minus;
    report.gaussian_bound_ok = true;
    report.gaussian_worst_ratio = 0.0;
    return {profile, report};
  }

  // Reject negative diffusivity on the relevant range.
  for (int i = 0; i <= 256; ++i) {
    double u = U_minus + (U_plus - U_minus) * static_cast<double>(i) / 256.0;
    if (D.D(u) < -1e-12) throw std::invalid_argument("solve_scalar: D negative on [U_-, U_+]");
  }

  std::vector<double> schedule = config.eps_schedule;
  if (schedule.empty()) {
    if (D.D_star <= 0.0)
      throw std::invalid_argument("solve_scalar: degenerate D requires an eps schedule");
    schedule = {0.0};
  }

  ShootEnv env;
  env.D = D.D;
  env.U_minus = U_minus;
  env.U_plus = U_plus;
  env.delta = U_plus - U_minus;
  env.grid = &grid;
  env.substeps = config.ode_substeps;

  Interval u0_full{U_minus, U_plus};
  StageSolution sol;
  bool have_warm = false;
  for (double eps : schedule) {
    env.eps = eps;
    Interval q_guess{0.0, 2.0 * std::sqrt((D.D_sup + eps) / 8.0) * env.delta};
    sol = solve_stage(env, u0_full, q_guess, have_warm ? &sol : nullptr, config.max_bisect_iter,
                      config.shoot_tol);
    have_warm = true;
    if (std::getenv("SIMPROF_DEBUG"))
      std::fprintf(stderr, "stage eps=%g U0=%.12g Q0=%.12g mismatch=%.3e width=%.3e\n", eps,
                   sol.U0, sol.Q0, sol.mismatch, sol.bracket_width);
  }

  // Final trajectory at the converged unknowns.
  env.eps = schedule.back();
  std::vector<double> Uarr(static_cast<size_t>(n), 0.0), Qarr(static_cast<size_t>(n), 0.0);
  integrate_half(env, +1, sol.U0, sol.Q0, &Uarr, &Qarr);
  integrate_half(env, -1, sol.U0, sol.Q0, &Uarr, &Qarr);

  const double snap_tol = 1e-9;
  for (int i = 0; i < n; ++i) {
    double u = std::clamp(Uarr[static_cast<size_t>(i)], U_minus, U_plus);
    if (u - U_minus < snap_tol) u = U_minus;
    if (U_plus - u < snap_tol) u = U_plus;
    double q_int = std::max(Qarr[static_cast<size_t>(i)], 0.0);
    double d = std::max(D.D(u), 0.0);
    double q = (d + env.eps > 0.0) ? q_int * d / (d + env.eps) : 0.0;
    profile.U[static_cast<size_t>(i)](0) = u;
    profile.Q[static_cast<size_t>(i)](0) = q;
    if (d < 1e-8 && q > 1e-8) report.singular_nodes.push_back(i);
  }

  report.U0 = sol.U0;
  report.Q0 = profile.Q[static_cast<size_t>(grid.center_index())](0);
  report.boundary_mismatch = std::max(std::abs(profile.U.front()(0) - U_minus),
                                      std::abs(profile.U.back()(0) - U_plus));
  if (report.boundary_mismatch > config.shoot_tol && sol.mismatch > config.shoot_tol)
    throw std::runtime_error("solve_scalar: shooting failed to meet the boundary tolerance");

  SupportEndpoints se = support_endpoints(D, U_minus, U_plus, report.U0, report.Q0);
  report.y_minus_star = se.y_minus;
  report.y_plus_star = se.y_plus;
  report.support_quadrature_ok = se.quadrature_ok;

  GaussianBoundReport gb = verify_gaussian_bounds(profile, std::max(D.D_sup, 1e-300));
  report.gaussian_bound_ok = gb.ok;
  report.gaussian_worst_ratio = gb.worst_ratio;
  return {profile, report};
}

GaussianBoundReport verify_gaussian_bounds(const Profile& profile, double D_sup, double slack) {
  const Grid& g = profile.grid;
  const int n = g.n_points;
  const int c = g.center_index();
  const double U_plus = profile.boundary.U_plus(0);
  const double U_minus = profile.boundary.U_minus(0);
  double worst_log = -std::numeric_limits<double>::infinity();

  // Complements U_+ - U(y) carry an absolute rounding error of machine
  // epsilon, so multiplicative comparisons below ~1e-8 of the range are
  // noise; the same applies to the flux relative to its peak.
  const double delta_pm = profile.boundary.delta_pm();
  const double u_cut = 1e-8 * std::max(delta_pm, 1e-300);
  double q_max = 0.0;
  for (const auto& q : profile.Q) q_max = std::max(q_max, q(0));
  const double q_cut = 1e-8 * std::max(q_max, 1e-300);

  auto log_or_skip = [](double x, double cut) {
    return x > cut ? std::log(x) : -std::numeric_limits<double>::infinity();
  };

  std::vector<double> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = g.node(i);

  // Right half: U_+ - U(y) <= (U_+ - U(z)) e^{-(y^2 - z^2)/(4 D^*)}, z <= y.
  for (int zi = c; zi < n; ++zi) {
    double lw = log_or_skip(U_plus - profile.U[static_cast<size_t>(zi)](0), u_cut);
    for (int yi = zi; yi < n; ++yi) {
      double ln = log_or_skip(U_plus - profile.U[static_cast<size_t>(yi)](0), u_cut);
      if (!std::isfinite(ln)) continue;
      double lr = ln - lw +
                  (y[static_cast<size_t>(yi)] * y[static_cast<size_t>(yi)] -
                   y[static_cast<size_t>(zi)] * y[static_cast<size_t>(zi)]) /
                      (4.0 * D_sup);
      worst_log = std::max(worst_log, lr);
    }
  }
  // Left half, mirrored.
  for (int zi = c; zi >= 0; --zi) {
    double lw = log_or_skip(profile.U[static_cast<size_t>(zi)](0) - U_minus, u_cut);
    for (int yi = zi; yi >= 0; --yi) {
      double ln = log_or_skip(profile.U[static_cast<size_t>(yi)](0) - U_minus, u_cut);
      if (!std::isfinite(ln)) continue;
      double lr = ln - lw +
                  (y[static_cast<size_t>(yi)] * y[static_cast<size_t>(yi)] -
                   y[static_cast<size_t>(zi)] * y[static_cast<size_t>(zi)]) /
                      (4.0 * D_sup);
      worst_log = std::max(worst_log, lr);
    }
  }
  // Flux, both half-lines.
  for (int sgn = -1; sgn <= 1; sgn += 2) {
    for (int dz = 0; c + sgn * dz >= 0 && c + sgn * dz < n; ++dz) {
      double lw = log_or_skip(profile.Q[static_cast<size_t>(c + sgn * dz)](0), q_cut);
      for (int dy = dz; c + sgn * dy >= 0 && c + sgn * dy < n; ++dy) {
        double ln = log_or_skip(profile.Q[static_cast<size_t>(c + sgn * dy)](0), q_cut);
        if (!std::isfinite(ln)) continue;
        double yy = y[static_cast<size_t>(c + sgn * dy)], zz = y[static_cast<size_t>(c + sgn * dz)];
        double lr = ln - lw + (yy * yy - zz * zz) / (4.0 * D_sup);
        worst_log = std::max(worst_log, lr);
      }
    }
  }

  GaussianBoundReport out;
  out.worst_ratio = std::isfinite(worst_log) ? std::exp(worst_log) : 0.0;
  out.ok = out.worst_ratio <= slack;
  return out;
}

SupportEndpoints support_endpoints(const ScalarDiffusivity& D, double U_minus, double U_plus,
                                   double U0, double Q0) {
  if (!(Q0 > 0.0)) throw std::invalid_argument("support_endpoints: requires Q0 > 0");
  SupportEndpoints out;
  auto fp = [&](double u) { return D.D(u) / (U_plus - u); };
  ImproperResult rp = integrate_to_singular_endpoint(fp, U0, U_plus);
  if (rp.converged) out.y_plus = (U_plus - U0) / Q0 * rp.value;

  auto fm = [&](double u) { return D.D(u) / (u - U_minus); };
  ImproperResult rm = integrate_to_singular_endpoint(
      [&](double t) { return fm(U0 - t); }, 0.0, U0 - U_minus);
  if (rm.converged) out.y_minus = -(U0 - U_minus) / Q0 * rm.value;
  // "ok" records that each integral either converged or was confidently
  // classified as divergent (in which case the endpoint is at infinity).
  out.quadrature_ok = std::isfinite(rp.value) == rp.converged &&
                      std::isfinite(rm.value) == rm.converged;
  return out;
}

LpCheck lp_derivative_check(const Profile& profile, const ScalarDiffusivity& D, double p,
                            double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("lp check: theta in (0,1)");
  if (!(p >= 1.0)) throw std::invalid_argument("lp check: p >= 1");
  const Grid& g = profile.grid;
  const int n = g.n_points;
  const double h = g.spacing;
  std::vector<double> integrand(static_cast<size_t>(n), 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    double up = (profile.U[static_cast<size_t>(i + 1)](0) - profile.U[static_cast<size_t>(i - 1)](0)) /
                (2.0 * h);
    integrand[static_cast<size_t>(i)] = std::pow(std::abs(up), p);
  }
  LpCheck out;
  out.lhs = trapezoid(integrand, h);

  const double U_minus = profile.boundary.U_minus(0);
  const double U_plus = profile.boundary.U_plus(0);
  const double U0 = profile.U[static_cast<size_t>(g.center_index())](0);
  double chat = std::sqrt(2.0 * D.D_sup / (1.0 - theta)) * (U_plus - U_minus) /
                (std::pow(U_plus - U0, theta) * std::pow(U0 - U_minus, theta));
  double ctilde;
  if (p == 1.0) {
    ctilde = U_plus - U_minus;
  } else {
    auto f = [&](double u) {
      double mu = std::pow(U_plus - u, theta) * std::pow(u - U_minus, theta);
      double d = D.D(u);
      if (d <= 0.0) return std::numeric_limits<double>::infinity();
      return std::pow(mu / d, p - 1.0);
    };
    ImproperResult r = integrate_with_endpoint_singularities(f, U_minus, U_plus);
    if (!r.converged) {
      out.quadrature_ok = false;
      return out;
    }
    ctilde = r.value;
  }
  out.rhs = std::pow(chat, p - 1.0) * ctilde;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

OracleId oracle_id_from_string(const std::string& name) {
  if (name == "linear") return OracleId::Linear;
  if (name == "degen_I") return OracleId::DegenI;
  if (name == "degen_II") return OracleId::DegenII;
  if (name == "degen_III") return OracleId::DegenIII;
  if (name == "gl_phase") return OracleId::GlPhase;
  throw std::invalid_argument("unknown oracle id: " + name);
}

ScalarDiffusivity oracle_diffusivity(OracleId id, double param) {
  switch (id) {
    case OracleId::Linear: {
      ScalarDiffusivity d;
      d.D = [param](double) { return param; };
      d.D_star = d.D_sup = param;
      return d;
    }
    case OracleId::DegenI: {
      ScalarDiffusivity d;
      d.D = [](double u) { return (1.0 - u * u) / 4.0; };
      d.D_star = 0.0;
      d.D_sup = 0.25;
      return d;
    }
    case OracleId::DegenII: {
      ScalarDiffusivity d;
      d.D = [](double u) {
        double y = inverse_cubic(u);
        return (1.0 - y * y) / 8.0;
      };
      d.D_star = 0.0;
      d.D_sup = 0.125;
      return d;
    }
    case OracleId::DegenIII: {
      // Differentiating the inverse-cubic profile gives Q = (1/16)(1-u^2)(5-u^2)
      // and hence D = Q/U' = (3/32)(1-u^2)^2(5-u^2).
      ScalarDiffusivity d;
      d.D = [](double u) { return 3.0 / 32.0 * (1.0 - u * u) * (1.0 - u * u) * (5.0 - u * u); };
      d.D_star = 0.0;
      d.D_sup = 15.0 / 32.0;
      return d;
    }
    case OracleId::GlPhase: {
      // Phase-diffusion diffusivity; positive on (-1/sqrt(3), 1/sqrt(3)).
      ScalarDiffusivity d;
      d.D = [](double eta) { return (1.0 - 3.0 * eta * eta) / (1.0 - eta * eta); };
      double lo = -0.45, hi = 0.45;
      double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
      for (int i = 0; i <= 1000; ++i) {
        double e = lo + (hi - lo) * i / 1000.0;
        double v = d.D(e);
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
      }
      d.D_star = dmin;
      d.D_sup = dmax;
      return d;
    }
  }
  throw std::logic_error("unreachable");
}

Profile closed_form_oracle(OracleId id, const Grid& grid, double param) {
  Profile p;
  p.grid = grid;
  const int n = grid.n_points;
  p.U.assign(static_cast<size_t>(n), VectorXd::Zero(1));
  p.Q.assign(static_cast<size_t>(n), VectorXd::Zero(1));
  switch (id) {
    case OracleId::Linear: {
      p.boundary = BoundaryPair(0.0, 1.0);
      double d = param;
      for (int i = 0; i < n; ++i) {
        double y = grid.node(i);
        p.U[static_cast<size_t>(i)](0) = 0.5 * (1.0 + std::erf(y / (2.0 * std::sqrt(d))));
        p.Q[static_cast<size_t>(i)](0) = std::sqrt(d / (4.0 * M_PI)) * std::exp(-y * y / (4.0 * d));
      }
      return p;
    }
    case OracleId::DegenI: {
      p.boundary = BoundaryPair(-1.0, 1.0);
      for (int i = 0; i < n; ++i) {
        double y = grid.node(i);
        double u = std::clamp(y, -1.0, 1.0);
        p.U[static_cast<size_t>(i)](0) = u;
        p.Q[static_cast<size_t>(i)](0) = (std::abs(y) < 1.0) ? (1.0 - y * y) / 4.0 : 0.0;
      }
      return p;
    }
    case OracleId::DegenII: {
      p.boundary = BoundaryPair(-1.0, 1.0);
      for (int i = 0; i < n; ++i) {
        double y = grid.node(i);
        if (y <= -1.0) {
          p.U[static_cast<size_t>(i)](0) = -1.0;
        } else if (y >= 1.0) {
          p.U[static_cast<size_t>(i)](0) = 1.0;
        } else {
          p.U[static_cast<size_t>(i)](0) = 1.5 * y - 0.5 * y * y * y;
          double s = 1.0 - y * y;
          p.Q[static_cast<size_t>(i)](0) = 3.0 / 16.0 * s * s;
        }
      }
      return p;
    }
    case OracleId::DegenIII: {
      p.boundary = BoundaryPair(-1.0, 1.0);
      for (int i = 0; i < n; ++i) {
        double y = grid.node(i);
        double u = inverse_cubic(std::clamp(y, -1.0, 1.0));
        p.U[static_cast<size_t>(i)](0) = u;
        if (std::abs(y) < 1.0)
          p.Q[static_cast<size_t>(i)](0) = (1.0 - u * u) * (5.0 - u * u) / 16.0;
      }
      return p;
    }
    case OracleId::GlPhase:
      throw std::invalid_argument("gl_phase provides a diffusivity only, no closed-form profile");
  }
  throw std::logic_error("unreachable");
}

bool q0_quadrature_bracket(const ScalarDiffusivity& D, double U_minus, double U_plus, double U0,
                           double Q0, double rel_slack) {
  auto d = [&](double u) { return D.D(u); };
  double lower_left = adaptive_simpson([&](double s) { return (s - U_minus) * d(s); }, U_minus, U0);
  double upper_left =
      (U0 - U_minus) * adaptive_simpson([&](double s) { return d(s); }, U_minus, U0);
  double lower_right = adaptive_simpson([&](double s) { return (U_plus - s) * d(s); }, U0, U_plus);
  double upper_right = (U_plus - U0) * adaptive_simpson([&](double s) { return d(s); }, U0, U_plus);
  double q2 = 2.0 * Q0 * Q0;
  bool ok_left = q2 >= lower_left * (1.0 - rel_slack) && q2 <= upper_left * (1.0 + rel_slack);
  bool ok_right = q2 >= lower_right * (1.0 - rel_slack) && q2 <= upper_right * (1.0 + rel_slack);
  return ok_left && ok_right;
}

}  // namespace simprof
