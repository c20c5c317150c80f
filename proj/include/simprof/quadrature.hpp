#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace simprof {

/// Trapezoid rule over uniformly spaced samples.
inline double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

namespace detail {
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  // Non-finite samples never satisfy the tolerance; give them a short
  // subdivision budget instead of a full binary blowup.
  int spend = std::isfinite(delta) ? 1 : 8;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - spend) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - spend);
}
}  // namespace detail

/// Adaptive Simpson quadrature on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 48) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

struct ImproperResult {
  double value = 0.0;
  bool converged = false;
};

/// Integral of f over [a, b) where f may have a singularity at u = b.
/// Substitutes u = b - e^{-s} and sums unit windows in s until the tail is
/// negligible; flags divergence when the windows stop decaying.
inline ImproperResult integrate_to_singular_endpoint(const std::function<double(double)>& f,
                                                     double a, double b, double rel_tol = 1e-10) {
  ImproperResult out;
  if (b <= a) {
    out.converged = true;
    return out;
  }
  const double s0 = -std::log(b - a);
  auto g = [&](double s) { return f(b - std::exp(-s)) * std::exp(-s); };
  double accum = 0.0;
  double prev_term = std::numeric_limits<double>::infinity();
  int stalled = 0;
  // Past this point b - exp(-s) rounds to b and samples hit the singularity
  // itself; the remaining tail is resolved by geometric extrapolation instead.
  const double s_resolution =
      -std::log(std::numeric_limits<double>::epsilon() * std::max(std::abs(b), 1.0));
  for (int j = 0; j < 80; ++j) {
    double lo = s0 + j, hi = s0 + j + 1;
    if (hi >= s_resolution) break;
    double term = adaptive_simpson(g, lo, hi, 1e-13 * (1.0 + std::abs(accum)), 40);
    if (!std::isfinite(term)) break;
    double ratio = std::isfinite(prev_term) ? std::abs(term) / std::abs(prev_term) : 1.0;
    accum += term;
    double scale = std::max(std::abs(accum), 1e-300);
    if (std::abs(term) <= rel_tol * scale) {
      out.value = accum;
      out.converged = true;
      return out;
    }
    if (std::abs(term) > 0.9 * std::abs(prev_term)) {
      if (++stalled >= 8) {  // not decaying: divergent integral
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
    } else {
      stalled = 0;
    }
    prev_term = term;
    if (j + 1 >= 80 || s0 + j + 2 >= s_resolution) {
      // Resolution limit reached with a decaying sequence: extrapolate the
      // geometric tail and accept when it is small relative to the total.
      if (ratio < 0.95) {
        double tail = std::abs(term) * ratio / (1.0 - ratio);
        accum += (term > 0.0 ? tail : -tail);
        out.value = accum;
        // The geometric model is good to a few percent of the tail, so the
        // result is accepted when the tail itself is a small correction.
        out.converged = tail <= 1e-4 * std::max(std::abs(accum), 1e-300);
        return out;
      }
    }
  }
  out.value = std::numeric_limits<double>::infinity();
  out.converged = false;
  return out;
}

/// Integral over (a, b) allowing integrable singularities at both endpoints:
/// split at the midpoint and treat each half with the endpoint substitution.
inline ImproperResult integrate_with_endpoint_singularities(
    const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10) {
  double mid = 0.5 * (a + b);
  ImproperResult right = integrate_to_singular_endpoint(f, mid, b, rel_tol);
  auto refl = [&](double u) { return f(a + b - u); };
  ImproperResult left = integrate_to_singular_endpoint(refl, mid, b, rel_tol);
  ImproperResult out;
  out.converged = left.converged && right.converged;
  out.value = out.converged ? left.value + right.value : std::numeric_limits<double>::infinity();
  return out;
}

/// Least-squares slope of (x, y) pairs.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                        double* residual = nullptr) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double dn = static_cast<double>(n);
  double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  if (residual) {
    double icept = (sy - slope * sx) / dn;
    double r = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double e = y[i] - slope * x[i] - icept;
      r += e * e;
    }
    *residual = std::sqrt(r / dn);
  }
  return slope;
}

}  // namespace simprof
