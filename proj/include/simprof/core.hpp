#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace simprof {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Uniform symmetric mesh on [-L, L] with an odd number of points, so that
/// y = 0 is a node.
struct Grid {
  double half_width = 0.0;
  int n_points = 0;
  double spacing = 0.0;

  Grid() = default;
  Grid(double L, int n) : half_width(L), n_points(n) {
    if (!(L > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("Grid: n_points must be odd and >= 3");
    spacing = 2.0 * L / static_cast<double>(n - 1);
  }

  double node(int i) const { return -half_width + spacing * static_cast<double>(i); }
  int center_index() const { return (n_points - 1) / 2; }

  std::vector<double> nodes() const {
    std::vector<double> y(static_cast<size_t>(n_points));
    for (int i = 0; i < n_points; ++i) y[static_cast<size_t>(i)] = node(i);
    y[static_cast<size_t>(center_index())] = 0.0;
    return y;
  }
};

/// Choose L so that exp(-L^2 / (4 * diff_scale)) < 1e-12, with the default
/// point count 2001.
inline Grid default_grid(double diff_scale, int n_points = 2001) {
  double L = std::ceil(std::sqrt(4.0 * std::max(diff_scale, 1e-12) * 27.7));
  return Grid(L, n_points);
}

/// The prescribed limits U(-inf) = U_minus and U(+inf) = U_plus.
struct BoundaryPair {
  VectorXd U_minus;
  VectorXd U_plus;

  BoundaryPair() = default;
  BoundaryPair(VectorXd um, VectorXd up) : U_minus(std::move(um)), U_plus(std::move(up)) {
    if (U_minus.size() != U_plus.size())
      throw std::invalid_argument("BoundaryPair: dimension mismatch");
    if (!U_minus.allFinite() || !U_plus.allFinite())
      throw std::invalid_argument("BoundaryPair: non-finite entries");
  }
  BoundaryPair(double um, double up)
      : BoundaryPair(VectorXd::Constant(1, um), VectorXd::Constant(1, up)) {}

  int dim() const { return static_cast<int>(U_minus.size()); }
  double delta_pm() const { return (U_plus - U_minus).norm(); }
  VectorXd midpoint() const { return 0.5 * (U_minus + U_plus); }

  /// Step function with the prescribed limits; midpoint value at y = 0.
  VectorXd step(double y) const {
    if (y > 0.0) return U_plus;
    if (y < 0.0) return U_minus;
    return midpoint();
  }
};

/// Odd quintic interpolating function: chi(t) = 15t/8 - 5t^3/4 + 3t^5/8
/// clamped to [-1, 1]. C^2 at t = +-1, monotone, chi(+-1) = +-1.
struct SmoothInterpolant {
  static double chi(double t) {
    if (t >= 1.0) return 1.0;
    if (t <= -1.0) return -1.0;
    return t * (15.0 / 8.0 + t * t * (-5.0 / 4.0 + t * t * (3.0 / 8.0)));
  }
  static double dchi(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    double s = 1.0 - t * t;
    return (15.0 / 8.0) * s * s;
  }
  static double d2chi(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return -(15.0 / 2.0) * t * (1.0 - t * t);
  }
};

/// Smoothened interpolant between U_minus and U_plus with transition width
/// set by a_up: value(y) = (1 - chi(y/sqrt(a_up)))/2 U_- + (1 + chi)/2 U_+.
/// Agrees with the step function outside the transition zone.
class TildeU {
 public:
  TildeU(BoundaryPair boundary, double a_up)
      : boundary_(std::move(boundary)), a_up_(a_up) {
    if (!(a_up > 0.0) || !std::isfinite(a_up))
      throw std::invalid_argument("TildeU: a_up must be positive and finite");
    inv_scale_ = 1.0 / std::sqrt(a_up);
    half_delta_ = 0.5 * (boundary_.U_plus - boundary_.U_minus);
    mid_ = boundary_.midpoint();
  }

  VectorXd value(double y) const { return mid_ + SmoothInterpolant::chi(y * inv_scale_) * half_delta_; }
  VectorXd derivative(double y) const {
    return (SmoothInterpolant::dchi(y * inv_scale_) * inv_scale_) * half_delta_;
  }
  VectorXd second_derivative(double y) const {
    return (SmoothInterpolant::d2chi(y * inv_scale_) * inv_scale_ * inv_scale_) * half_delta_;
  }

  /// Half-width of the transition zone; value coincides with the step
  /// function for |y| >= support_radius().
  double support_radius() const { return std::sqrt(a_up_); }
  double a_up() const { return a_up_; }
  const BoundaryPair& boundary() const { return boundary_; }

 private:
  BoundaryPair boundary_;
  double a_up_;
  double inv_scale_;
  VectorXd half_delta_;
  VectorXd mid_;
};

inline TildeU build_tilde_u(const BoundaryPair& boundary, double a_up) {
  return TildeU(boundary, a_up);
}

/// Grid-sampled profile with companion flux Q(y) = (A(U))'(y).
struct Profile {
  Grid grid;
  std::vector<VectorXd> U;
  std::vector<VectorXd> Q;
  BoundaryPair boundary;

  int dim() const { return boundary.dim(); }

  double component(int node, int comp) const { return U[static_cast<size_t>(node)](comp); }
};

/// Constitutive map A : R^m -> R^m with certified constants.
struct VectorFluxMap {
  int dim = 1;
  std::function<VectorXd(const VectorXd&)> A;
  std::function<MatrixXd(const VectorXd&)> jacobian;
  double a_lo = 0.0;
  double a_up = 1.0;
  double delta = 0.0;
};

/// Scalar diffusivity D(u) >= 0 with its extrema over [U_-, U_+].
struct ScalarDiffusivity {
  std::function<double(double)> D;
  double D_star = 0.0;  // min over [U_-, U_+]
  double D_sup = 1.0;   // max over [U_-, U_+]
};

inline ScalarDiffusivity make_scalar_diffusivity(std::function<double(double)> D, double u_lo,
                                                 double u_hi, int samples = 20001) {
  ScalarDiffusivity out;
  out.D = std::move(D);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  if (u_hi <= u_lo) {
    lo = hi = out.D(u_lo);
  } else {
    for (int i = 0; i < samples; ++i) {
      double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
      double d = out.D(u);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  out.D_star = std::max(lo, 0.0);
  out.D_sup = hi;
  return out;
}

/// Axis-aligned box in R^m.
struct Box {
  VectorXd lo;
  VectorXd hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

struct CertifiedConstants {
  double a_lo_est = 0.0;
  double a_up_est = 0.0;
  double delta_est = 0.0;
  int samples = 0;
  bool sampled_bounds = true;  // estimates are sampled, not global, bounds
};

/// Sample the Jacobian of A on a tensor grid over the box (endpoints included,
/// so corners are always sampled) and report the monotonicity constants:
///   a_lo_est  = min over samples of lambda_min(sym DA),
///   a_up_est  = max over samples of ||DA||_2,
///   delta_est = min over samples of min_v <v, DA v>/|DA v|^2.
CertifiedConstants certify_constants(const VectorFluxMap& A, const Box& box,
                                     int samples_per_axis = 17);

}  // namespace simprof
