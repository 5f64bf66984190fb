// SPDX-License-Identifier: Apache-2.0
#include "lqomor/laguerre.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>

namespace lqomor {

namespace {

std::atomic<long> g_factorization_count{0};

Eigen::PartialPivLU<Matrix> shifted_lu(const Matrix& A, double alpha) {
  const Index n = A.rows();
  Matrix shifted = A - alpha * Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> lu(shifted);
  // A stable and alpha > 0 keep alpha out of the spectrum; still guard
  // against a degenerate factorization.
  const double diag_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(diag_min > 0.0) || !std::isfinite(diag_min)) {
    throw solver_error("laguerre: singular A - alpha I");
  }
  return lu;
}

// W_{i} = W_{i-1} + 2 alpha (A - alpha I)^{-1} W_{i-1}, starting from
// W_0 = sqrt(2 alpha) (alpha I - A)^{-1} Z; transposed variant solves
// against (A - alpha I)'.
template <bool Transposed>
std::vector<Matrix> coeff_blocks(const Matrix& A, double alpha, int N,
                                 const Matrix& Z) {
  if (A.rows() != A.cols()) throw shape_error("laguerre: A not square");
  if (Z.rows() != A.rows()) throw shape_error("laguerre: Z row mismatch");
  if (!(alpha > 0.0)) throw shape_error("laguerre: alpha must be positive");
  if (N < 1) throw shape_error("laguerre: N must be >= 1");

  const auto lu = shifted_lu(A, alpha);
  auto solve = [&](const Matrix& rhs) -> Matrix {
    if constexpr (Transposed) {
      Matrix out = lu.transpose().solve(rhs);
      return out;
    } else {
      Matrix out = lu.solve(rhs);
      return out;
    }
  };

  std::vector<Matrix> blocks;
  blocks.reserve(N);
  blocks.push_back(-std::sqrt(2.0 * alpha) * solve(Z));
  for (int i = 1; i < N; ++i) {
    blocks.push_back(blocks.back() + 2.0 * alpha * solve(blocks.back()));
  }
  return blocks;
}

Matrix concat_blocks(const std::vector<Matrix>& blocks) {
  const Index rows = blocks.front().rows();
  const Index cols = blocks.front().cols();
  Matrix out(rows, cols * static_cast<Index>(blocks.size()));
  for (Index i = 0; i < static_cast<Index>(blocks.size()); ++i) {
    out.middleCols(i * cols, cols) = blocks[static_cast<size_t>(i)];
  }
  return out;
}

// Seed [C', sqrt(2) M F] shared by every block of the output factor.
Matrix output_seed(const LqoSystem& sys, const Matrix& F) {
  Matrix seed(sys.order(), 1 + F.cols());
  seed.col(0) = sys.C.transpose();
  seed.rightCols(F.cols()) = std::sqrt(2.0) * (sys.M * F);
  return seed;
}

}  // namespace

void LaguerreConfig::validate() const {
  if (!(alpha > 0.0)) throw shape_error("LaguerreConfig: alpha must be > 0");
  if (terms < 1) throw shape_error("LaguerreConfig: terms must be >= 1");
}

std::vector<Matrix> laguerre_coeff_apply(const Matrix& A, double alpha, int N,
                                         const Matrix& Z) {
  return coeff_blocks<false>(A, alpha, N, Z);
}

std::vector<Matrix> laguerre_coeff_apply_transposed(const Matrix& A,
                                                    double alpha, int N,
                                                    const Matrix& Z) {
  return coeff_blocks<true>(A, alpha, N, Z);
}

FullOrderFactors::FullOrderFactors(const LqoSystem& sys,
                                   const LaguerreConfig& cfg)
    : cfg_(cfg) {
  cfg_.validate();
  const double alpha = cfg_.alpha;
  const int N = cfg_.terms;
  const auto lu = shifted_lu(sys.A, alpha);
  g_factorization_count.fetch_add(1, std::memory_order_relaxed);

  std::vector<Matrix> fb;
  fb.reserve(N);
  fb.push_back(-std::sqrt(2.0 * alpha) * lu.solve(sys.B));
  for (int i = 1; i < N; ++i) {
    fb.push_back(fb.back() + 2.0 * alpha * lu.solve(fb.back()));
  }
  F_ = concat_blocks(fb);

  const Matrix seed = output_seed(sys, F_);
  std::vector<Matrix> gb;
  gb.reserve(N);
  // Transposed solves must be materialized directly; Eigen does not allow
  // composing dec.transpose().solve() into larger expressions.
  Matrix w = lu.transpose().solve(seed);
  gb.push_back(-std::sqrt(2.0 * alpha) * w);
  for (int i = 1; i < N; ++i) {
    w = lu.transpose().solve(gb.back());
    gb.push_back(gb.back() + 2.0 * alpha * w);
  }
  G_ = concat_blocks(gb);
}

ReducedFactors::ReducedFactors(const LqoSystem& reduced,
                               const LaguerreConfig& cfg) {
  cfg.validate();
  F_ = concat_blocks(
      laguerre_coeff_apply(reduced.A, cfg.alpha, cfg.terms, reduced.B));
  G_ = concat_blocks(laguerre_coeff_apply_transposed(
      reduced.A, cfg.alpha, cfg.terms, output_seed(reduced, F_)));
}

Matrix approx_X(const FullOrderFactors& full, const ReducedFactors& reduced) {
  if (full.input_factor().cols() != reduced.input_factor().cols()) {
    throw shape_error("approx_X: factor column mismatch (N or m differ)");
  }
  return full.input_factor() * reduced.input_factor().transpose();
}

Matrix approx_K(const FullOrderFactors& full, const ReducedFactors& reduced) {
  if (full.output_factor().cols() != reduced.output_factor().cols()) {
    throw shape_error("approx_K: factor column mismatch (N or m differ)");
  }
  return -full.output_factor() * reduced.output_factor().transpose();
}

double pick_alpha(const Matrix& A) {
  if (!is_stable(A, 0.0)) throw solver_error("pick_alpha: unstable A");
  const SchurForm schur = real_schur(A);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& lambda : schur_eigenvalues(schur)) {
    const double mag = std::abs(lambda.real());
    lo = std::min(lo, mag);
    hi = std::max(hi, mag);
  }
  const double alpha = std::sqrt(lo * hi);
  return std::clamp(alpha, 1e-3, 1e3);
}

long laguerre_factorization_count() {
  return g_factorization_count.load(std::memory_order_relaxed);
}

void reset_laguerre_factorization_count() { g_factorization_count.store(0); }

}  // namespace lqomor
