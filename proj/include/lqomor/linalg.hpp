// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqomor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dimension or precondition violations on the caller's side.
struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical failures inside a solver (singular operator, no convergence, ...).
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Real Schur decomposition A = Q T Q' with orthogonal Q and quasi-triangular
/// T (1x1 and 2x2 diagonal blocks).
struct SchurForm {
  Matrix orthogonal;
  Matrix quasi_triangular;

  Index size() const { return orthogonal.rows(); }
};

SchurForm real_schur(const Matrix& A);

/// Schur form of A' obtained from that of A by reversal, no extra iteration.
SchurForm transposed_schur(const SchurForm& schur);

/// Eigenvalues read off the quasi-triangular factor.
std::vector<std::complex<double>> schur_eigenvalues(const SchurForm& schur);

/// Solves A X + X B + C = 0 (Bartels-Stewart over the real Schur forms).
/// Requires spectra of A and -B disjoint; throws solver_error otherwise.
Matrix solve_sylvester(const Matrix& A, const Matrix& B, const Matrix& C);
Matrix solve_sylvester(const SchurForm& schur_a, const SchurForm& schur_b,
                       const Matrix& C);

/// Solves A P + P A' + W = 0 for stable A and symmetric W. The result is
/// symmetrized before it is returned.
Matrix solve_lyapunov(const Matrix& A, const Matrix& W);
Matrix solve_lyapunov(const SchurForm& schur_a, const SchurForm& schur_at,
                      const Matrix& W);

struct QrFactors {
  Matrix Q;  // n x r, orthonormal columns
  Matrix R;  // r x r, upper triangular, strictly positive diagonal
};

/// Thin QR with the sign convention diag(R) > 0, which makes the pair unique.
/// Throws solver_error when N is numerically rank deficient.
QrFactors qr_positive(const Matrix& N);

double spectral_abscissa(const Matrix& A);

/// True iff every eigenvalue satisfies Re(lambda) < -margin.
bool is_stable(const Matrix& A, double margin);
/// Default margin: 1e-10 * ||A||_2, separating rounding noise from
/// genuine marginal stability.
bool is_stable(const Matrix& A);

void require_finite(const Matrix& A, const char* what);

}  // namespace lqomor
