// SPDX-License-Identifier: Apache-2.0
#include "lqomor/stiefel.hpp"

#include <atomic>
#include <cmath>

namespace lqomor {

namespace {
std::atomic<long> g_reorth_count{0};
}

StiefelPoint::StiefelPoint(Matrix V) : V_(std::move(V)) {
  if (V_.cols() > V_.rows()) {
    throw shape_error("StiefelPoint: more columns than rows");
  }
  require_finite(V_, "StiefelPoint");
  const Index r = V_.cols();
  const double defect =
      (V_.transpose() * V_ - Matrix::Identity(r, r)).norm();
  if (defect > 1e-10 * std::sqrt(static_cast<double>(r))) {
    V_ = qr_positive(V_).Q;
    g_reorth_count.fetch_add(1, std::memory_order_relaxed);
  }
}

double StiefelPoint::orthonormality_defect() const {
  const Index r = V_.cols();
  return (V_.transpose() * V_ - Matrix::Identity(r, r)).norm();
}

long stiefel_reorthonormalization_count() {
  return g_reorth_count.load(std::memory_order_relaxed);
}

void reset_stiefel_reorthonormalization_count() { g_reorth_count.store(0); }

Matrix project_tangent(const StiefelPoint& V, const Matrix& D) {
  const Matrix& Vm = V.matrix();
  if (D.rows() != Vm.rows() || D.cols() != Vm.cols()) {
    throw shape_error("project_tangent: shape mismatch");
  }
  const Matrix W = Vm.transpose() * D;
  return D - 0.5 * Vm * (W + W.transpose());
}

StiefelPoint retract(const StiefelPoint& V, const Matrix& eta) {
  const Matrix& Vm = V.matrix();
  if (eta.rows() != Vm.rows() || eta.cols() != Vm.cols()) {
    throw shape_error("retract: shape mismatch");
  }
  if (eta.isZero(0.0)) return V;  // R_V(0) = V exactly
  return StiefelPoint(qr_positive(Vm + eta).Q);
}

Matrix rho_skew(const Matrix& D) {
  if (D.rows() != D.cols()) throw shape_error("rho_skew: non-square input");
  Matrix S = Matrix::Zero(D.rows(), D.cols());
  for (Index i = 1; i < D.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      S(i, j) = D(i, j);
      S(j, i) = -D(i, j);
    }
  }
  return S;
}

Matrix transport(const StiefelPoint& V, const Matrix& eta, const Matrix& xi) {
  const Matrix& Vm = V.matrix();
  if (eta.rows() != Vm.rows() || eta.cols() != Vm.cols() ||
      xi.rows() != Vm.rows() || xi.cols() != Vm.cols()) {
    throw shape_error("transport: shape mismatch");
  }
  const QrFactors qr = qr_positive(Vm + eta);
  // q(V+eta)'(V+eta) is exactly the R factor; the r x r inverse is applied
  // as a triangular solve.
  const Matrix Z = qr.R.transpose()
                       .triangularView<Eigen::Lower>()
                       .solve(xi.transpose())
                       .transpose();
  const Matrix Y = qr.Q.transpose() * Z;
  return qr.Q * (rho_skew(Y) - Y) + Z;
}

Matrix deflate(const Matrix& transported, double source_norm) {
  if (source_norm < 0.0) throw shape_error("deflate: negative source norm");
  const double norm = transported.norm();
  if (norm <= source_norm || norm == 0.0) return transported;
  return (source_norm / norm) * transported;
}

ProductPoint::ProductPoint(StiefelPoint U_, Matrix B_, Matrix C_, Matrix M_)
    : U(std::move(U_)), B(std::move(B_)), C(std::move(C_)), M(std::move(M_)) {
  const Index r = U.cols();
  if (B.rows() != r) throw shape_error("ProductPoint: B row count");
  if (C.rows() != 1 || C.cols() != r) throw shape_error("ProductPoint: C shape");
  if (M.rows() != r || M.cols() != r) throw shape_error("ProductPoint: M shape");
  require_finite(B, "ProductPoint.B");
  require_finite(C, "ProductPoint.C");
  require_finite(M, "ProductPoint.M");
  M = 0.5 * (M + M.transpose()).eval();
}

ProductTangent product_project(const ProductPoint& P, const Matrix& dU,
                               const Matrix& dB, const Matrix& dC,
                               const Matrix& dM) {
  if (dB.rows() != P.B.rows() || dB.cols() != P.B.cols() ||
      dC.rows() != 1 || dC.cols() != P.C.cols() ||
      dM.rows() != P.M.rows() || dM.cols() != P.M.cols()) {
    throw shape_error("product_project: shape mismatch");
  }
  return {project_tangent(P.U, dU), dB, dC,
          0.5 * (dM + dM.transpose())};
}

ProductPoint product_retract(const ProductPoint& P, const ProductTangent& xi) {
  return ProductPoint(retract(P.U, xi.U), P.B + xi.B, P.C + xi.C, P.M + xi.M);
}

ProductTangent product_transport(const ProductPoint& P,
                                 const ProductTangent& along,
                                 const ProductTangent& xi) {
  return {transport(P.U, along.U, xi.U), xi.B, xi.C, xi.M};
}

double product_inner(const ProductTangent& a, const ProductTangent& b) {
  return (a.U.array() * b.U.array()).sum() +
         (a.B.array() * b.B.array()).sum() +
         (a.C.array() * b.C.array()).sum() +
         (a.M.array() * b.M.array()).sum();
}

ProductTangent product_combine(double a, const ProductTangent& x, double b,
                               const ProductTangent& y) {
  return {a * x.U + b * y.U, a * x.B + b * y.B, a * x.C + b * y.C,
          a * x.M + b * y.M};
}

ProductTangent product_scaled(const ProductTangent& x, double a) {
  return {a * x.U, a * x.B, a * x.C, a * x.M};
}

}  // namespace lqomor
