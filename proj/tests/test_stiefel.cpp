// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "lqomor/stiefel.hpp"
#include "test_support.hpp"

using namespace lqomor;
using testsup::random_matrix;
using testsup::random_stiefel;
using testsup::random_tangent;

TEST_CASE("StiefelPoint re-orthonormalizes drifted inputs") {
  Rng rng(301);
  const Matrix Q = qr_positive(random_matrix(rng, 20, 4)).Q;
  reset_stiefel_reorthonormalization_count();
  const StiefelPoint clean(Q);
  CHECK(stiefel_reorthonormalization_count() == 0);
  const StiefelPoint drifted(Q * 1.001);
  CHECK(stiefel_reorthonormalization_count() == 1);
  CHECK(drifted.orthonormality_defect() < 1e-10 * 2.0);
}

TEST_CASE("project_tangent") {
  Rng rng(303);
  const StiefelPoint V = random_stiefel(rng, 30, 6);

  SUBCASE("normal-space component maps to zero") {
    Matrix S = random_matrix(rng, 6, 6);
    S = 0.5 * (S + S.transpose()).eval();
    CHECK(project_tangent(V, V.matrix() * S).norm() < 1e-12);
  }
  SUBCASE("idempotent on tangent input") {
    const Matrix xi = random_tangent(rng, V);
    CHECK((project_tangent(V, xi) - xi).norm() < 1e-12 * xi.norm());
  }
  SUBCASE("matches the explicit formula") {
    const Matrix D = random_matrix(rng, 30, 6);
    const Matrix expected =
        D - 0.5 * V.matrix() *
                (V.matrix().transpose() * D + D.transpose() * V.matrix());
    CHECK((project_tangent(V, D) - expected).norm() < 1e-13);
    const Matrix W = V.matrix().transpose() * project_tangent(V, D);
    CHECK((W + W.transpose()).norm() < 1e-12);
  }
  SUBCASE("self-adjoint in the trace metric") {
    const Matrix D1 = random_matrix(rng, 30, 6);
    const Matrix D2 = random_matrix(rng, 30, 6);
    const double lhs =
        (project_tangent(V, D1).array() * D2.array()).sum();
    const double rhs =
        (D1.array() * project_tangent(V, D2).array()).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("retract") {
  SUBCASE("zero tangent returns the same point exactly") {
    Rng rng(307);
    const StiefelPoint V = random_stiefel(rng, 15, 3);
    const StiefelPoint W = retract(V, Matrix::Zero(15, 3));
    CHECK(W.matrix() == V.matrix());
  }
  SUBCASE("two-vector normalization") {
    Matrix V0(2, 1), eta(2, 1);
    V0 << 1.0, 0.0;
    eta << 0.0, 1.0;
    const StiefelPoint W = retract(StiefelPoint(V0), eta);
    CHECK(W.matrix()(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(W.matrix()(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
  SUBCASE("first-order consistency with the identity") {
    Rng rng(311);
    const StiefelPoint V = random_stiefel(rng, 25, 5);
    const Matrix xi = random_tangent(rng, V);
    double prev_err = std::numeric_limits<double>::infinity();
    for (const double t : {1e-3, 1e-4, 1e-5}) {
      const Matrix diff =
          (retract(V, t * xi).matrix() - V.matrix()) / t - xi;
      const double err = diff.norm() / xi.norm();
      CHECK(err < 10.0 * t * xi.norm());  // slope error O(t)
      CHECK(err < prev_err);
      prev_err = err;
    }
  }
}

TEST_CASE("rho_skew") {
  Matrix D(2, 2);
  D << 0.0, 5.0, 2.0, 0.0;
  const Matrix S = rho_skew(D);
  CHECK(S(0, 1) == -2.0);
  CHECK(S(1, 0) == 2.0);
  CHECK(rho_skew(Matrix::Identity(4, 4) * 3.0).norm() == 0.0);
  Rng rng(313);
  Matrix Z = random_matrix(rng, 5, 5);
  Matrix skew = 0.5 * (Z - Z.transpose());
  CHECK((rho_skew(skew) - skew).norm() < 1e-15);
  CHECK_THROWS_AS(rho_skew(Matrix::Zero(2, 3)), shape_error);
}

TEST_CASE("transport") {
  Rng rng(317);
  const StiefelPoint V = random_stiefel(rng, 30, 6);
  const Matrix eta = random_tangent(rng, V);
  const Matrix xi = random_tangent(rng, V);

  SUBCASE("consistency at eta = 0") {
    const Matrix moved = transport(V, Matrix::Zero(30, 6), xi);
    CHECK((moved - xi).norm() < 1e-10 * xi.norm());
  }
  SUBCASE("linearity") {
    const Matrix a = transport(V, eta, xi);
    const Matrix b = transport(V, eta, 2.5 * xi - 0.75 * eta);
    const Matrix c = transport(V, eta, eta);
    CHECK((b - (2.5 * a - 0.75 * c)).norm() < 1e-10 * (b.norm() + 1.0));
  }
  SUBCASE("lands in the tangent space at the retracted point") {
    const StiefelPoint W = retract(V, eta);
    const Matrix moved = transport(V, eta, xi);
    const Matrix check = W.matrix().transpose() * moved;
    CHECK((check + check.transpose()).norm() < 1e-8 * moved.norm());
  }
}

TEST_CASE("deflate") {
  Rng rng(331);
  const Matrix T = random_matrix(rng, 8, 3);
  CHECK(deflate(T, 2.0 * T.norm()) == T);
  const Matrix capped = deflate(T, 0.5 * T.norm());
  CHECK(capped.norm() == doctest::Approx(0.5 * T.norm()).epsilon(1e-14));
  CHECK((capped / capped.norm() - T / T.norm()).norm() < 1e-14);
  for (int i = 0; i < 20; ++i) {
    const Matrix R = random_matrix(rng, 5, 2);
    const double cap = std::abs(rng.normal());
    CHECK(deflate(R, cap).norm() <= cap * (1.0 + 1e-15) + 1e-300);
  }
  CHECK(deflate(Matrix::Zero(3, 2), 1.0).norm() == 0.0);
}

TEST_CASE("product manifold operations") {
  Rng rng(337);
  const Index n = 20, r = 4, m = 2;
  const StiefelPoint U = random_stiefel(rng, n, r);
  Matrix M0 = random_matrix(rng, r, r);
  M0 = 0.5 * (M0 + M0.transpose()).eval();
  const ProductPoint P(U, random_matrix(rng, r, m), random_matrix(rng, 1, r),
                       M0);

  SUBCASE("projection fixes tangent tuples and symmetrizes M") {
    const ProductTangent xi{random_tangent(rng, U), random_matrix(rng, r, m),
                            random_matrix(rng, 1, r),
                            [&] {
                              Matrix Z = random_matrix(rng, r, r);
                              return (0.5 * (Z + Z.transpose())).eval();
                            }()};
    const ProductTangent again =
        product_project(P, xi.U, xi.B, xi.C, xi.M);
    CHECK((again.U - xi.U).norm() < 1e-12);
    CHECK(again.B == xi.B);
    CHECK(again.M == xi.M);

    Matrix Z = random_matrix(rng, r, r);
    const Matrix skew = 0.5 * (Z - Z.transpose());
    const ProductTangent killed = product_project(P, xi.U, xi.B, xi.C, skew);
    CHECK(killed.M.norm() < 1e-15);
  }
  SUBCASE("retraction: zero tangent is identity, B-only steps move B only") {
    const ProductTangent zero{Matrix::Zero(n, r), Matrix::Zero(r, m),
                              Matrix::Zero(1, r), Matrix::Zero(r, r)};
    const ProductPoint Q = product_retract(P, zero);
    CHECK(Q.U.matrix() == P.U.matrix());
    CHECK(Q.B == P.B);

    ProductTangent b_step = zero;
    b_step.B = random_matrix(rng, r, m);
    const ProductPoint R2 = product_retract(P, b_step);
    CHECK(R2.U.matrix() == P.U.matrix());
    CHECK(R2.C == P.C);
    CHECK(R2.M == P.M);
    CHECK(R2.B == P.B + b_step.B);
    CHECK(R2.U.orthonormality_defect() < 1e-10 * std::sqrt(double(r)));
  }
  SUBCASE("transport moves the Stiefel slot and copies the rest") {
    const ProductTangent along{random_tangent(rng, U), random_matrix(rng, r, m),
                               random_matrix(rng, 1, r), Matrix::Zero(r, r)};
    const ProductTangent xi{random_tangent(rng, U), random_matrix(rng, r, m),
                            random_matrix(rng, 1, r), Matrix::Zero(r, r)};
    const ProductTangent moved = product_transport(P, along, xi);
    CHECK(moved.B == xi.B);
    CHECK(moved.C == xi.C);
    CHECK((moved.U - transport(U, along.U, xi.U)).norm() == 0.0);
  }
  SUBCASE("metric is the sum of componentwise trace inner products") {
    const ProductTangent a{random_matrix(rng, n, r), random_matrix(rng, r, m),
                           random_matrix(rng, 1, r), random_matrix(rng, r, r)};
    const ProductTangent b{random_matrix(rng, n, r), random_matrix(rng, r, m),
                           random_matrix(rng, 1, r), random_matrix(rng, r, r)};
    const double expected = (a.U.transpose() * b.U).trace() +
                            (a.B.transpose() * b.B).trace() +
                            (a.C.transpose() * b.C).trace() +
                            (a.M.transpose() * b.M).trace();
    CHECK(product_inner(a, b) == doctest::Approx(expected).epsilon(1e-12));
  }
}
