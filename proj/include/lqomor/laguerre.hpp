// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "lqomor/lqo_system.hpp"

namespace lqomor {

/// Truncated Laguerre expansion parameters: time-scale factor alpha > 0 and
/// number of retained terms N >= 1.
struct LaguerreConfig {
  double alpha = 1.0;
  int terms = 32;

  void validate() const;
};

/// Blocks [A_0 Z, A_1 Z, ..., A_{N-1} Z] of the Laguerre coefficient
/// recursion
///   A_0 = sqrt(2 alpha) (alpha I - A)^{-1},
///   A_i = (A + alpha I)(A - alpha I)^{-1} A_{i-1},
/// driven by a single factorization of (A - alpha I).
std::vector<Matrix> laguerre_coeff_apply(const Matrix& A, double alpha, int N,
                                         const Matrix& Z);
/// Same blocks for the transposed coefficients, [A_0' Z, ..., A_{N-1}' Z],
/// reusing the factorization of (A - alpha I) through transposed solves.
std::vector<Matrix> laguerre_coeff_apply_transposed(const Matrix& A,
                                                    double alpha, int N,
                                                    const Matrix& Z);

/// Full-order factors, computed once per (system, alpha, N):
///   F = [A_0 B ... A_{N-1} B]                        n x (N m)
///   G = [A_0'[C', sqrt(2) M F] ... A_{N-1}'[...]]     n x (N (1 + N m))
class FullOrderFactors {
 public:
  FullOrderFactors(const LqoSystem& sys, const LaguerreConfig& cfg);

  const Matrix& input_factor() const { return F_; }
  const Matrix& output_factor() const { return G_; }
  const LaguerreConfig& config() const { return cfg_; }

 private:
  LaguerreConfig cfg_;
  Matrix F_;
  Matrix G_;
};

/// Reduced-side counterparts, rebuilt every iteration from the current
/// reduced model (order-r solves only).
class ReducedFactors {
 public:
  ReducedFactors(const LqoSystem& reduced, const LaguerreConfig& cfg);

  const Matrix& input_factor() const { return F_; }
  const Matrix& output_factor() const { return G_; }

 private:
  Matrix F_;
  Matrix G_;
};

/// X ~ F F_r', the low-rank approximation of A X + X Ar' + B Br' = 0.
Matrix approx_X(const FullOrderFactors& full, const ReducedFactors& reduced);
/// K ~ -G G_r', the low-rank approximation of A'K + K Ar - C'Cr - 2 M X Mr = 0.
Matrix approx_K(const FullOrderFactors& full, const ReducedFactors& reduced);

/// Geometric mean of the extreme |Re(lambda)| of a stable A, clamped to
/// [1e-3, 1e3].
double pick_alpha(const Matrix& A);

/// Count of full-order (A - alpha I) factorizations since the last reset.
long laguerre_factorization_count();
void reset_laguerre_factorization_count();

}  // namespace lqomor
