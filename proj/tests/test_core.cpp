#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "simprof/core.hpp"
#include "simprof/quadrature.hpp"

#include <cmath>
#include <random>

using namespace simprof;

TEST_CASE("grid nodes are symmetric and hit zero exactly") {
  Grid g(5.0, 101);
  CHECK(g.spacing == doctest::Approx(0.1));
  CHECK(g.node(g.center_index()) == 0.0);
  for (int i = 0; i < g.n_points; ++i)
    CHECK(g.node(i) == doctest::Approx(-g.node(g.n_points - 1 - i)).epsilon(1e-15));
  CHECK_THROWS(Grid(5.0, 100));   // even count
  CHECK_THROWS(Grid(-1.0, 101));  // negative width
}

TEST_CASE("default grid width follows the Gaussian-tail rule") {
  Grid g = default_grid(1.0);
  CHECK(g.half_width == doctest::Approx(std::ceil(std::sqrt(4.0 * 1.0 * 27.7))));
  CHECK(g.n_points == 2001);
  CHECK(std::exp(-g.half_width * g.half_width / 4.0) < 1e-12);
}

TEST_CASE("interpolant: degenerate boundary pair stays constant") {
  BoundaryPair b(3.0, 3.0);
  TildeU tu = build_tilde_u(b, 2.0);
  for (double y : {-5.0, -0.3, 0.0, 1.7}) {
    CHECK(tu.value(y)(0) == doctest::Approx(3.0));
    CHECK(tu.derivative(y)(0) == doctest::Approx(0.0));
  }
}

TEST_CASE("interpolant hits the midpoint at zero and saturates outside") {
  BoundaryPair b(-1.0, 2.0);
  TildeU tu = build_tilde_u(b, 1.0);
  CHECK(tu.value(0.0)(0) == doctest::Approx(0.5));
  CHECK(tu.value(2.0)(0) == 2.0);  // a_up = 1, |y| >= 1: exact saturation
  CHECK(tu.value(-1.0)(0) == -1.0);
  CHECK(tu.value(1.0)(0) == 2.0);
  CHECK(tu.derivative(1.5)(0) == 0.0);
  CHECK(tu.second_derivative(-2.0)(0) == 0.0);
}

TEST_CASE("interpolant point symmetry about the midpoint") {
  BoundaryPair b(Eigen::Vector2d(0.0, -2.0), Eigen::Vector2d(1.0, 4.0));
  TildeU tu = build_tilde_u(b, 0.7);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    double y = dist(rng);
    VectorXd s = tu.value(y) + tu.value(-y);
    CHECK(s(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s(1) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("interpolant L2-norm scaling in a_up") {
  // With support radius sqrt(a_up): ||tilde_u'||_L2 ~ a_up^{-1/4} and
  // ||tilde_u''||_L2 ~ a_up^{-3/4} (exponent check only).
  BoundaryPair b(0.0, 1.0);
  double prev1 = 0.0, prev2 = 0.0;
  for (double a : {1.0, 16.0, 256.0}) {
    TildeU tu = build_tilde_u(b, a);
    double h = std::sqrt(a) / 4000.0, s1 = 0.0, s2 = 0.0;
    for (int i = -4000; i <= 4000; ++i) {
      double d1 = tu.derivative(i * h)(0), d2 = tu.second_derivative(i * h)(0);
      s1 += d1 * d1 * h;
      s2 += d2 * d2 * h;
    }
    double n1 = std::sqrt(s1), n2 = std::sqrt(s2);
    if (prev1 > 0.0) {
      CHECK(prev1 / n1 == doctest::Approx(std::pow(16.0, 0.25)).epsilon(2e-2));
      CHECK(prev2 / n2 == doctest::Approx(std::pow(16.0, 0.75)).epsilon(2e-2));
    }
    prev1 = n1;
    prev2 = n2;
  }
}

TEST_CASE("certify identity map") {
  VectorFluxMap A;
  A.dim = 2;
  A.A = [](const VectorXd& u) { return u; };
  A.jacobian = [](const VectorXd& u) {
    return MatrixXd::Identity(u.size(), u.size());
  };
  Box box{VectorXd::Zero(2), VectorXd::Ones(2)};
  CertifiedConstants c = certify_constants(A, box);
  CHECK(c.a_lo_est == doctest::Approx(1.0));
  CHECK(c.a_up_est == doctest::Approx(1.0));
  CHECK(c.delta_est == doctest::Approx(1.0));
  CHECK(c.sampled_bounds);
}

TEST_CASE("certify a non-monotone constant-coefficient map") {
  MatrixXd M(2, 2);
  M << 1.0, 0.01, 0.5, 0.0396;
  VectorFluxMap A;
  A.dim = 2;
  A.A = [M](const VectorXd& u) { return VectorXd(M * u); };
  A.jacobian = [M](const VectorXd&) { return M; };
  Box box{VectorXd::Constant(2, -1.0), VectorXd::Ones(2)};
  CertifiedConstants c = certify_constants(A, box);
  CHECK(c.a_lo_est < 0.0);
}

TEST_CASE("certify a skew-symmetric map: zero symmetric part") {
  double omega = 2.0;
  MatrixXd M(2, 2);
  M << 0.0, -omega, omega, 0.0;
  VectorFluxMap A;
  A.dim = 2;
  A.A = [M](const VectorXd& u) { return VectorXd(M * u); };
  A.jacobian = [M](const VectorXd&) { return M; };
  Box box{VectorXd::Constant(2, -1.0), VectorXd::Ones(2)};
  CertifiedConstants c = certify_constants(A, box);
  CHECK(c.a_lo_est == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c.delta_est == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("epsilon shift raises the monotonicity constant by epsilon") {
  MatrixXd M(2, 2);
  M << 0.0, -1.0, 1.0, 0.0;
  Box box{VectorXd::Constant(2, -1.0), VectorXd::Ones(2)};
  for (double eps : {0.5, 0.01}) {
    VectorFluxMap A;
    A.dim = 2;
    A.A = [M, eps](const VectorXd& u) { return VectorXd(M * u + eps * u); };
    A.jacobian = [M, eps](const VectorXd&) {
      return MatrixXd(M + eps * MatrixXd::Identity(2, 2));
    };
    CertifiedConstants c = certify_constants(A, box);
    CHECK(c.a_lo_est == doctest::Approx(eps).epsilon(1e-12));
    CHECK(c.a_lo_est <= c.a_up_est);
  }
}

TEST_CASE("random nonlinear maps keep a_lo <= a_up") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double a = dist(rng), bcoef = dist(rng);
    VectorFluxMap A;
    A.dim = 2;
    A.A = [a, bcoef](const VectorXd& u) {
      VectorXd r(2);
      r << u(0) + a * std::sin(u(1)), bcoef * u(0) * u(0) + u(1);
      return r;
    };
    A.jacobian = [a, bcoef](const VectorXd& u) {
      MatrixXd J(2, 2);
      J << 1.0, a * std::cos(u(1)), 2.0 * bcoef * u(0), 1.0;
      return J;
    };
    Box box{VectorXd::Constant(2, -2.0), VectorXd::Constant(2, 2.0)};
    CertifiedConstants c = certify_constants(A, box, 9);
    CHECK(c.a_lo_est <= c.a_up_est + 1e-14);
  }
}

TEST_CASE("scalar diffusivity extrema sampling") {
  ScalarDiffusivity d = make_scalar_diffusivity([](double u) { return (1.0 - u * u) / 4.0; },
                                                -1.0, 1.0);
  CHECK(d.D_star == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.D_sup == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("adaptive simpson and improper quadrature") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Convergent endpoint singularity: integral of 1/sqrt(1-u) on [0,1] = 2.
  ImproperResult r = integrate_to_singular_endpoint(
      [](double u) { return 1.0 / std::sqrt(1.0 - u); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  // Divergent: 1/(1-u).
  ImproperResult rd = integrate_to_singular_endpoint(
      [](double u) { return 1.0 / (1.0 - u); }, 0.0, 1.0);
  CHECK_FALSE(rd.converged);
  CHECK(std::isinf(rd.value));
}
