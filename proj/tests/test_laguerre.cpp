// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "lqomor/gradients.hpp"
#include "lqomor/laguerre.hpp"
#include "test_support.hpp"

using namespace lqomor;
using testsup::random_matrix;
using testsup::random_stable;
using testsup::random_stiefel;

namespace {

LqoSystem scalar_system(double a, double b, double c, double m) {
  Matrix A(1, 1), B(1, 1), C(1, 1), M(1, 1);
  A << a;
  B << b;
  C << c;
  M << m;
  return LqoSystem(A, B, C, M);
}

}  // namespace

TEST_CASE("laguerre coefficients annihilate when A + alpha I = 0") {
  Matrix A(1, 1), Z(1, 1);
  A << -1.0;
  Z << 1.0;
  const auto blocks = laguerre_coeff_apply(A, 1.0, 4, Z);
  CHECK(blocks[0](0, 0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  for (size_t i = 1; i < blocks.size(); ++i) CHECK(blocks[i].norm() < 1e-15);

  const auto eye = laguerre_coeff_apply(-Matrix::Identity(3, 3), 1.0, 3,
                                        Matrix::Identity(3, 3));
  CHECK((eye[0] - (std::sqrt(2.0) / 2.0) * Matrix::Identity(3, 3)).norm() < 1e-15);
  CHECK(eye[1].norm() < 1e-15);
}

TEST_CASE("laguerre coefficient blocks match a dense-inverse oracle") {
  Rng rng(501);
  const Index n = 50;
  const Matrix A = random_stable(rng, n);
  const Matrix Z = random_matrix(rng, n, 3);
  const double alpha = 0.8;
  const int N = 6;

  // Oracle with explicit inverses.
  const Matrix A0 =
      std::sqrt(2.0 * alpha) *
      (alpha * Matrix::Identity(n, n) - A).inverse();
  const Matrix cay =
      (A + alpha * Matrix::Identity(n, n)) *
      (A - alpha * Matrix::Identity(n, n)).inverse();
  std::vector<Matrix> expect{A0 * Z};
  for (int i = 1; i < N; ++i) expect.push_back(cay * expect.back());

  const auto blocks = laguerre_coeff_apply(A, alpha, N, Z);
  const auto blocks_t =
      laguerre_coeff_apply_transposed(A, alpha, N, Z);
  Matrix coeff = A0;  // running A_i for the transposed oracle
  for (int i = 0; i < N; ++i) {
    CHECK((blocks[i] - expect[i]).norm() < 1e-10 * (1.0 + expect[i].norm()));
    CHECK((blocks_t[i] - coeff.transpose() * Z).norm() <
          1e-10 * (1.0 + Z.norm()));
    coeff = cay * coeff;
  }
}

TEST_CASE("approx_X scalar: exact at N = 1") {
  const LqoSystem sys = scalar_system(-1, 1, 1, 1);
  const LaguerreConfig cfg{1.0, 1};
  const FullOrderFactors full(sys, cfg);
  const ReducedFactors red(sys, cfg);
  CHECK(approx_X(full, red)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("approx_X vanishes with zero input matrix") {
  Rng rng(503);
  const Matrix A = random_stable(rng, 12);
  const LqoSystem sys(A, Matrix::Zero(12, 1), random_matrix(rng, 1, 12),
                      Matrix::Identity(12, 12));
  const LaguerreConfig cfg{1.0, 8};
  const FullOrderFactors full(sys, cfg);
  const ReducedFactors red(sys, cfg);
  CHECK(approx_X(full, red).norm() == 0.0);
}

TEST_CASE("approx_K scalar closed form") {
  // a = ar = -1, every other coefficient 1: X = 1/2 and
  // K = (c cr + 2 m X mr)/(a + ar) = -1; at alpha = 1 the expansion is
  // exact after the first term.
  const LqoSystem sys = scalar_system(-1, 1, 1, 1);
  const H2Objective exact(sys);
  const GradientWorkspace ws = exact.solve_workspace(sys);
  CHECK(ws.K(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));

  for (int N : {1, 2, 4, 8}) {
    const LaguerreConfig cfg{1.0, N};
    const FullOrderFactors full(sys, cfg);
    const ReducedFactors red(sys, cfg);
    CHECK(approx_K(full, red)(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
  }

  const LqoSystem silent = scalar_system(-1, 1, 0, 0);
  const LaguerreConfig cfg{1.0, 4};
  const FullOrderFactors full(silent, cfg);
  const ReducedFactors red(silent, cfg);
  CHECK(approx_K(full, red).norm() == 0.0);
}

TEST_CASE("pick_alpha") {
  CHECK(pick_alpha(-Matrix::Identity(4, 4)) == doctest::Approx(1.0));
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = -1.0;
  D(1, 1) = -100.0;
  CHECK(pick_alpha(D) == doctest::Approx(10.0).epsilon(1e-12));
  Matrix U(1, 1);
  U << 0.5;
  CHECK_THROWS_AS(pick_alpha(U), solver_error);
  // Wide spectra clamp into [1e-3, 1e3].
  Matrix W = Matrix::Zero(2, 2);
  W(0, 0) = -1e-8;
  W(1, 1) = -1e-2;
  CHECK(pick_alpha(W) == doctest::Approx(1e-3));
}

TEST_CASE("error against the exact solver is nonincreasing in N") {
  Rng rng(509);
  const LqoSystem sys = testsup::random_system(rng, 40, 1);
  const H2Objective exact(sys);
  const LqoSystem red = galerkin_reduce(sys, random_stiefel(rng, 40, 6));
  const GradientWorkspace ws = exact.solve_workspace(red);
  const double alpha = pick_alpha(sys.A);

  double prev = std::numeric_limits<double>::infinity();
  bool reached_tol = false;
  for (int N : {8, 16, 32, 64, 128}) {
    const LaguerreConfig cfg{alpha, N};
    const FullOrderFactors full(sys, cfg);
    const ReducedFactors rf(red, cfg);
    const double err = (approx_X(full, rf) - ws.X).norm() / ws.X.norm();
    CHECK(err <= 2.0 * prev);  // envelope with 2x slack
    prev = err;
    if (err < 1e-4) reached_tol = true;
  }
  CHECK(reached_tol);
}

TEST_CASE("full-order factorization happens once per factors object") {
  Rng rng(521);
  const LqoSystem sys = testsup::random_system(rng, 20, 1);
  reset_laguerre_factorization_count();
  const LaguerreConfig cfg{1.0, 16};
  const FullOrderFactors full(sys, cfg);
  CHECK(laguerre_factorization_count() == 1);
  // Reduced factors never touch the full-order count.
  const LqoSystem red = galerkin_reduce(sys, random_stiefel(rng, 20, 4));
  for (int i = 0; i < 5; ++i) {
    const ReducedFactors rf(red, cfg);
    (void)approx_X(full, rf);
  }
  CHECK(laguerre_factorization_count() == 1);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(LaguerreConfig({-1.0, 4}).validate(), shape_error);
  CHECK_THROWS_AS(LaguerreConfig({1.0, 0}).validate(), shape_error);
}
