// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

#include "lqomor/linalg.hpp"

namespace lqomor {

/// Linear system with a quadratic output:
///   x' = A x + B u,   y = C x + x' M x
/// with a single (scalar) output channel. M is symmetrized on construction.
class LqoSystem {
 public:
  LqoSystem(Matrix A, Matrix B, Matrix C, Matrix M);

  Index order() const { return A.rows(); }
  Index inputs() const { return B.cols(); }

  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix C;  // 1 x n
  Matrix M;  // n x n, symmetric
};

/// P solving A P + P A' + B B' = 0. Requires a stable A.
Matrix controllability_gramian(const LqoSystem& sys);

/// Q solving A' Q + Q A + C' C + M P M = 0 with P the controllability
/// Gramian; the linear and quadratic output contributions are folded into
/// one solve.
Matrix observability_gramian(const LqoSystem& sys);

/// sqrt(tr(B' Q B)). Throws solver_error on an unstable system, whose H2
/// norm is infinite.
double h2_norm(const LqoSystem& sys);

/// Order n+r block system whose output is y - y_hat.
LqoSystem error_system(const LqoSystem& full, const LqoSystem& reduced);

/// Blocks of the error-system Gramians and the squared H2 error
///   J = tr(B'QB + 2 B'Y Br + Br' Qr Br).
/// An unstable reduced model yields error_sq = +inf with empty blocks.
struct H2ErrorBlocks {
  double error_sq = 0.0;
  Matrix X;   // n x r:  A X + X Ar' + B Br' = 0
  Matrix Pr;  // r x r:  Ar Pr + Pr Ar' + Br Br' = 0
  Matrix Y;   // n x r:  A' Y + Y Ar - C' Cr - M X Mr = 0
  Matrix Qr;  // r x r:  Ar' Qr + Qr Ar + Cr' Cr + Mr Pr Mr = 0
};
H2ErrorBlocks h2_error_blocks(const LqoSystem& full, const LqoSystem& reduced);

/// ||full - reduced||_H2 / ||full||_H2, computed through the Gramian blocks.
double relative_h2_error(const LqoSystem& full, const LqoSystem& reduced);

/// Fixed-step classical RK4 from a zero initial state, with the quadratic
/// output evaluated on every grid point.
struct Trajectory {
  Vector times;    // steps + 1 entries
  Vector output;   // y(t_k)
  Matrix states;   // n x (steps + 1)
};
using InputSignal = std::function<Vector(double)>;

Trajectory simulate(const LqoSystem& sys, const InputSignal& input,
                    double t_end, int steps);
/// Scalar input applied to every input channel.
Trajectory simulate(const LqoSystem& sys, const std::function<double(double)>& input,
                    double t_end, int steps);

/// Directory layout: A.mtx, B.mtx, C.mtx, M.mtx plus system.json holding
/// order, inputs and a label. `metadata` may carry extra generator fields.
void save_system(const LqoSystem& sys, const std::string& dir,
                 const std::string& label = "",
                 const std::string& metadata_json = "");
LqoSystem load_system(const std::string& dir);

}  // namespace lqomor
