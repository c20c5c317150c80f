#include "simprof/core.hpp"

#include <Eigen/Eigenvalues>

namespace simprof {

namespace {

/// min_v <v, M v> / |M v|^2 over unit vectors with M v != 0, as the smallest
/// generalized eigenvalue of (sym M, M^T M).
double delta_of_jacobian(const MatrixXd& M) {
  const int m = static_cast<int>(M.rows());
  MatrixXd S = 0.5 * (M + M.transpose());
  MatrixXd G = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<MatrixXd> gsolve(G);
  double gmax = gsolve.eigenvalues().maxCoeff();
  if (gmax <= 0.0) return 0.0;  // DA(u) = 0: condition vacuous, report 0
  double gmin = gsolve.eigenvalues().minCoeff();
  if (gmin <= 1e-12 * gmax) {
    // M is (near) singular. Directions in the kernel satisfy the condition
    // vacuously; if sym M vanishes along with them the spec pins the report
    // to 0, otherwise restrict to the range directions.
    MatrixXd V = gsolve.eigenvectors();
    std::vector<int> keep;
    for (int i = 0; i < m; ++i)
      if (gsolve.eigenvalues()(i) > 1e-12 * gmax) keep.push_back(i);
    if (keep.empty()) return 0.0;
    MatrixXd P(m, static_cast<int>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k)
      P.col(static_cast<int>(k)) =
          V.col(keep[k]) / std::sqrt(gsolve.eigenvalues()(keep[k]));
    MatrixXd Sred = P.transpose() * S * P;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sred);
    // Kernel directions have <v, M v> = 0 with M v = 0 and cap the report at 0.
    return std::min(es.eigenvalues().minCoeff(), 0.0);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(S, G);
  return es.eigenvalues().minCoeff();
}

}  // namespace

CertifiedConstants certify_constants(const VectorFluxMap& A, const Box& box,
                                     int samples_per_axis) {
  const int m = box.dim();
  if (m < 1) throw std::invalid_argument("certify_constants: empty box");
  for (int i = 0; i < m; ++i)
    if (!(box.lo(i) <= box.hi(i)) || !std::isfinite(box.lo(i)) || !std::isfinite(box.hi(i)))
      throw std::invalid_argument("certify_constants: invalid box bounds");
  if (samples_per_axis < 2) samples_per_axis = 2;

  CertifiedConstants out;
  out.a_lo_est = std::numeric_limits<double>::infinity();
  out.a_up_est = 0.0;
  out.delta_est = std::numeric_limits<double>::infinity();

  std::vector<int> idx(static_cast<size_t>(m), 0);
  long total = 1;
  for (int i = 0; i < m; ++i) total *= samples_per_axis;

  VectorXd u(m);
  for (long k = 0; k < total; ++k) {
    long rem = k;
    for (int i = 0; i < m; ++i) {
      int j = static_cast<int>(rem % samples_per_axis);
      rem /= samples_per_axis;
      double t = static_cast<double>(j) / static_cast<double>(samples_per_axis - 1);
      u(i) = box.lo(i) + t * (box.hi(i) - box.lo(i));
    }
    MatrixXd M = A.jacobian(u);
    if (!M.allFinite()) throw std::runtime_error("certify_constants: non-finite Jacobian");
    MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    out.a_lo_est = std::min(out.a_lo_est, es.eigenvalues().minCoeff());
    out.a_up_est = std::max(out.a_up_est, M.jacobiSvd().singularValues().maxCoeff());
    out.delta_est = std::min(out.delta_est, delta_of_jacobian(M));
    ++out.samples;
  }
  return out;
}

}  // namespace simprof
