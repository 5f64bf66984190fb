// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "lqomor/benchmarks.hpp"
#include "lqomor/stiefel.hpp"

namespace testsup {

using lqomor::Index;
using lqomor::Matrix;
using lqomor::Vector;

inline Matrix random_matrix(lqomor::Rng& rng, Index rows, Index cols) {
  Matrix A(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) A(i, j) = rng.normal();
  }
  return A;
}

// Stable by construction: symmetric negative definite part plus skew part.
inline Matrix random_stable(lqomor::Rng& rng, Index n) {
  const Matrix Z = random_matrix(rng, n, n);
  const Matrix O = lqomor::qr_positive(Z).Q;
  Vector eigs(n);
  for (Index i = 0; i < n; ++i) eigs(i) = rng.uniform(-2.0, -0.1);
  Matrix sym = O * eigs.asDiagonal() * O.transpose();
  sym = 0.5 * (sym + sym.transpose()).eval();
  const Matrix S = random_matrix(rng, n, n);
  return sym + 0.5 * (S - S.transpose());
}

inline lqomor::LqoSystem random_system(lqomor::Rng& rng, Index n, Index m) {
  Matrix M = random_matrix(rng, n, n);
  M = 0.5 * (M + M.transpose()).eval();
  return lqomor::LqoSystem(random_stable(rng, n), random_matrix(rng, n, m),
                           random_matrix(rng, 1, n), std::move(M));
}

inline lqomor::StiefelPoint random_stiefel(lqomor::Rng& rng, Index n, Index r) {
  return lqomor::StiefelPoint(lqomor::qr_positive(random_matrix(rng, n, r)).Q);
}

inline Matrix random_tangent(lqomor::Rng& rng, const lqomor::StiefelPoint& V) {
  return lqomor::project_tangent(V, random_matrix(rng, V.rows(), V.cols()));
}

// Brute-force Sylvester oracle: vec(X) = -(I (x) A + B' (x) I)^{-1} vec(C),
// column-major vec. Only for p*q small.
inline Matrix kron_sylvester_solve(const Matrix& A, const Matrix& B,
                                   const Matrix& C) {
  const Index p = A.rows();
  const Index q = B.rows();
  Matrix op = Matrix::Zero(p * q, p * q);
  for (Index j = 0; j < q; ++j) {
    op.block(j * p, j * p, p, p) = A;
    for (Index k = 0; k < q; ++k) {
      op.block(j * p, k * p, p, p) += B(k, j) * Matrix::Identity(p, p);
    }
  }
  Eigen::Map<const Vector> vec_c(C.data(), p * q);
  Vector x = op.partialPivLu().solve(-vec_c);
  return Eigen::Map<const Matrix>(x.data(), p, q);
}

inline double sylvester_residual_bound(const Matrix& A, const Matrix& B,
                                       const Matrix& C, const Matrix& X) {
  return 1e-10 * (A.norm() + B.norm()) * X.norm() + 1e-12 * C.norm();
}

}  // namespace testsup
