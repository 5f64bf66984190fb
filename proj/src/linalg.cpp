// SPDX-License-Identifier: Apache-2.0
#include "lqomor/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace lqomor {

namespace {

// Diagonal block sizes (1 or 2) of a real quasi-triangular matrix.
std::vector<Index> diagonal_blocks(const Matrix& T) {
  std::vector<Index> sizes;
  const Index n = T.rows();
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && T(i + 1, i) != 0.0) {
      sizes.push_back(2);
      i += 2;
    } else {
      sizes.push_back(1);
      i += 1;
    }
  }
  return sizes;
}

void append_block_eigenvalues(const Matrix& T,
                              std::vector<std::complex<double>>& out) {
  const Index n = T.rows();
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && T(i + 1, i) != 0.0) {
      const double a = T(i, i), b = T(i, i + 1);
      const double c = T(i + 1, i), d = T(i + 1, i + 1);
      const double mean = 0.5 * (a + d);
      const double det = a * d - b * c;
      const double disc = mean * mean - det;
      if (disc < 0.0) {
        const double im = std::sqrt(-disc);
        out.emplace_back(mean, im);
        out.emplace_back(mean, -im);
      } else {
        const double root = std::sqrt(disc);
        out.emplace_back(mean + root, 0.0);
        out.emplace_back(mean - root, 0.0);
      }
      i += 2;
    } else {
      out.emplace_back(T(i, i), 0.0);
      i += 1;
    }
  }
}

// Solves T_A Y + Y T_B + C = 0 with both factors upper quasi-triangular.
// Block columns of Y are resolved left to right, block rows bottom up.
Matrix quasi_triangular_sylvester(const Matrix& TA, const Matrix& TB,
                                  const Matrix& C) {
  const Index p = TA.rows();
  const Index q = TB.rows();
  Matrix Y = Matrix::Zero(p, q);

  const std::vector<Index> row_blocks = diagonal_blocks(TA);
  const std::vector<Index> col_blocks = diagonal_blocks(TB);

  Index jc = 0;
  for (Index jb = 0; jb < static_cast<Index>(col_blocks.size()); ++jb) {
    const Index qs = col_blocks[jb];
    // Right-hand side for this block column, folding in resolved columns.
    Matrix rhs = -C.middleCols(jc, qs);
    if (jc > 0) rhs.noalias() -= Y.leftCols(jc) * TB.block(0, jc, jc, qs);
    const Matrix S = TB.block(jc, jc, qs, qs);

    Index ic = p;
    for (Index ib = static_cast<Index>(row_blocks.size()) - 1; ib >= 0; --ib) {
      const Index ps = row_blocks[ib];
      ic -= ps;
      Matrix local = rhs.middleRows(ic, ps);
      const Index tail = p - (ic + ps);
      if (tail > 0) {
        local.noalias() -=
            TA.block(ic, ic + ps, ps, tail) * Y.block(ic + ps, jc, tail, qs);
      }
      // Small (<= 4x4) vectorized system (I (x) TA_ii + S' (x) I) z = rhs.
      const Matrix Tii = TA.block(ic, ic, ps, ps);
      Matrix op = Matrix::Zero(ps * qs, ps * qs);
      for (Index j = 0; j < qs; ++j) {
        op.block(j * ps, j * ps, ps, ps) = Tii;
        for (Index k = 0; k < qs; ++k) {
          op.block(j * ps, k * ps, ps, ps) +=
              S(k, j) * Matrix::Identity(ps, ps);
        }
      }
      Eigen::Map<const Eigen::VectorXd> vec_rhs(local.data(), ps * qs);
      Eigen::VectorXd z = Eigen::PartialPivLU<Matrix>(op).solve(vec_rhs);
      Y.block(ic, jc, ps, qs) =
          Eigen::Map<const Matrix>(z.data(), ps, qs);
    }
    jc += qs;
  }
  return Y;
}

void check_pencil(const SchurForm& schur_a, const SchurForm& schur_b) {
  std::vector<std::complex<double>> la, lb;
  append_block_eigenvalues(schur_a.quasi_triangular, la);
  append_block_eigenvalues(schur_b.quasi_triangular, lb);
  for (const auto& x : la) {
    for (const auto& y : lb) {
      if (std::abs(x + y) < 1e-12) {
        throw solver_error("singular Sylvester operator: eigenvalue sum " +
                           std::to_string(std::abs(x + y)));
      }
    }
  }
}

}  // namespace

void require_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) {
    throw shape_error(std::string(what) + ": non-finite entries");
  }
}

SchurForm real_schur(const Matrix& A) {
  if (A.rows() != A.cols()) throw shape_error("real_schur: non-square input");
  require_finite(A, "real_schur");
  Eigen::RealSchur<Matrix> schur(A);
  if (schur.info() != Eigen::Success) {
    throw solver_error("real_schur: iteration failed to converge");
  }
  return {schur.matrixU(), schur.matrixT()};
}

SchurForm transposed_schur(const SchurForm& schur) {
  const Index n = schur.size();
  // A = Q T Q'  ==>  A' = (Q J)(J T' J)(Q J)' with J the reversal, and
  // J T' J is again upper quasi-triangular.
  SchurForm out;
  out.orthogonal = schur.orthogonal.rowwise().reverse();
  out.quasi_triangular =
      schur.quasi_triangular.transpose().reverse().eval();
  (void)n;
  return out;
}

std::vector<std::complex<double>> schur_eigenvalues(const SchurForm& schur) {
  std::vector<std::complex<double>> ev;
  ev.reserve(schur.size());
  append_block_eigenvalues(schur.quasi_triangular, ev);
  return ev;
}

Matrix solve_sylvester(const SchurForm& schur_a, const SchurForm& schur_b,
                       const Matrix& C) {
  if (C.rows() != schur_a.size() || C.cols() != schur_b.size()) {
    throw shape_error("solve_sylvester: right-hand side shape mismatch");
  }
  require_finite(C, "solve_sylvester");
  check_pencil(schur_a, schur_b);
  const Matrix& QA = schur_a.orthogonal;
  const Matrix& QB = schur_b.orthogonal;
  const Matrix Ct = QA.transpose() * C * QB;
  const Matrix Y = quasi_triangular_sylvester(schur_a.quasi_triangular,
                                              schur_b.quasi_triangular, Ct);
  return QA * Y * QB.transpose();
}

Matrix solve_sylvester(const Matrix& A, const Matrix& B, const Matrix& C) {
  return solve_sylvester(real_schur(A), real_schur(B), C);
}

Matrix solve_lyapunov(const SchurForm& schur_a, const SchurForm& schur_at,
                      const Matrix& W) {
  const auto ev = schur_eigenvalues(schur_a);
  for (const auto& lambda : ev) {
    if (lambda.real() >= 0.0) {
      throw solver_error("solve_lyapunov: unstable coefficient");
    }
  }
  Matrix P = solve_sylvester(schur_a, schur_at, W);
  P = 0.5 * (P + P.transpose()).eval();
  return P;
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& W) {
  if (A.rows() != A.cols()) throw shape_error("solve_lyapunov: A not square");
  if (W.rows() != A.rows() || W.cols() != A.cols()) {
    throw shape_error("solve_lyapunov: W shape mismatch");
  }
  const SchurForm schur_a = real_schur(A);
  return solve_lyapunov(schur_a, transposed_schur(schur_a), W);
}

QrFactors qr_positive(const Matrix& N) {
  const Index n = N.rows();
  const Index r = N.cols();
  if (r > n) throw shape_error("qr_positive: more columns than rows");
  require_finite(N, "qr_positive");
  Eigen::HouseholderQR<Matrix> qr(N);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
  Matrix R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const double scale = N.norm();
  for (Index j = 0; j < r; ++j) {
    if (std::abs(R(j, j)) < 1e-12 * scale) {
      throw solver_error("qr_positive: rank deficient at column " +
                         std::to_string(j));
    }
    if (R(j, j) < 0.0) {
      Q.col(j) = -Q.col(j);
      R.row(j) = -R.row(j);
    }
  }
  return {std::move(Q), std::move(R)};
}

double spectral_abscissa(const Matrix& A) {
  const SchurForm schur = real_schur(A);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : schur_eigenvalues(schur)) {
    worst = std::max(worst, lambda.real());
  }
  return worst;
}

bool is_stable(const Matrix& A, double margin) {
  if (A.rows() != A.cols()) throw shape_error("is_stable: non-square input");
  return spectral_abscissa(A) < -margin;
}

bool is_stable(const Matrix& A) {
  if (A.rows() != A.cols()) throw shape_error("is_stable: non-square input");
  return is_stable(A, 1e-10 * A.operatorNorm());
}

}  // namespace lqomor
