// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lqomor/linalg.hpp"

namespace lqomor {

/// Column-orthonormal n x r matrix. Construction re-orthonormalizes (and
/// counts it) when ||V'V - I||_F exceeds 1e-10 * sqrt(r).
class StiefelPoint {
 public:
  explicit StiefelPoint(Matrix V);

  const Matrix& matrix() const { return V_; }
  Index rows() const { return V_.rows(); }
  Index cols() const { return V_.cols(); }

  double orthonormality_defect() const;

 private:
  Matrix V_;
};

/// Number of silent re-orthonormalizations performed by StiefelPoint
/// construction since the last reset. Drift instrumentation for long runs.
long stiefel_reorthonormalization_count();
void reset_stiefel_reorthonormalization_count();

/// P_V(D) = D - V (V'D + D'V)/2, the orthogonal projection onto the
/// tangent space at V.
Matrix project_tangent(const StiefelPoint& V, const Matrix& D);

/// Q factor of the QR decomposition of V + eta (diag(R) > 0). The zero
/// tangent returns V unchanged.
StiefelPoint retract(const StiefelPoint& V, const Matrix& eta);

/// Copies the strict lower triangle, zero diagonal, negated above.
Matrix rho_skew(const Matrix& D);

/// Vector transport of xi along eta, landing in the tangent space at
/// retract(V, eta).
Matrix transport(const StiefelPoint& V, const Matrix& eta, const Matrix& xi);

/// Caps the transported vector at the source norm:
/// min{1, source_norm/||transported||} * transported.
Matrix deflate(const Matrix& transported, double source_norm);

/// Point on St(n,r) x R^{r x m} x R^{1 x r} x S_r. M is kept exactly
/// symmetric.
struct ProductPoint {
  ProductPoint(StiefelPoint U_, Matrix B_, Matrix C_, Matrix M_);

  StiefelPoint U;
  Matrix B;  // r x m
  Matrix C;  // 1 x r
  Matrix M;  // r x r, symmetric
};

struct ProductTangent {
  Matrix U;  // n x r, tangent at the base Stiefel point
  Matrix B;
  Matrix C;
  Matrix M;  // symmetric
};

ProductTangent product_project(const ProductPoint& P, const Matrix& dU,
                               const Matrix& dB, const Matrix& dC,
                               const Matrix& dM);
ProductPoint product_retract(const ProductPoint& P, const ProductTangent& xi);
ProductTangent product_transport(const ProductPoint& P,
                                 const ProductTangent& along,
                                 const ProductTangent& xi);
double product_inner(const ProductTangent& a, const ProductTangent& b);
ProductTangent product_combine(double a, const ProductTangent& x, double b,
                               const ProductTangent& y);
ProductTangent product_scaled(const ProductTangent& x, double a);

}  // namespace lqomor
