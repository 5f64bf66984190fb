// SPDX-License-Identifier: Apache-2.0
#include "lqomor/gradients.hpp"

#include <cmath>
#include <limits>

namespace lqomor {

LqoSystem galerkin_reduce(const LqoSystem& sys, const StiefelPoint& V) {
  const Matrix& Vm = V.matrix();
  if (Vm.rows() != sys.order()) {
    throw shape_error("galerkin_reduce: basis row count mismatch");
  }
  return LqoSystem(Vm.transpose() * sys.A * Vm, Vm.transpose() * sys.B,
                   sys.C * Vm, Vm.transpose() * sys.M * Vm);
}

ProductPoint galerkin_embedding(const LqoSystem& sys, const StiefelPoint& V) {
  const Matrix& Vm = V.matrix();
  return ProductPoint(V, Vm.transpose() * sys.B, sys.C * Vm,
                      Vm.transpose() * sys.M * Vm);
}

H2Objective::H2Objective(LqoSystem sys, SolverBackend backend)
    : sys_(std::move(sys)), backend_(backend) {
  if (!is_stable(sys_.A)) {
    throw solver_error("H2Objective: full system must be stable");
  }
  schur_a_ = real_schur(sys_.A);
  schur_at_ = transposed_schur(schur_a_);
  if (backend_.mode == SolverBackend::Mode::laguerre) {
    laguerre_cfg_.alpha =
        backend_.alpha > 0.0 ? backend_.alpha : pick_alpha(sys_.A);
    laguerre_cfg_.terms = backend_.terms;
    factors_.emplace(sys_, laguerre_cfg_);
  }
}

bool H2Objective::reduced_stable(const LqoSystem& reduced) const {
  return is_stable(reduced.A);
}

H2Objective::CostBlocks H2Objective::cost_blocks(
    const LqoSystem& reduced) const {
  CostBlocks blocks;
  const SchurForm sr = real_schur(reduced.A);
  const SchurForm srt = transposed_schur(sr);
  blocks.Pr =
      solve_lyapunov(sr, srt, reduced.B * reduced.B.transpose());
  if (backend_.mode == SolverBackend::Mode::laguerre) {
    blocks.X = approx_X(*factors_, ReducedFactors(reduced, laguerre_cfg_));
  } else {
    blocks.X = solve_sylvester(schur_a_, srt,
                               sys_.B * reduced.B.transpose());
  }
  return blocks;
}

// Shifted cost through the trace identity
//   2 tr(B'Y Br) = -2 C X Cr' - 2 tr(X'M X Mr),
//   tr(Br'Qr Br) =  Cr Pr Cr' + tr(Mr Pr Mr Pr),
// which needs only X and Pr.
double H2Objective::shifted_cost_from(const LqoSystem& reduced,
                                      const CostBlocks& blocks) const {
  const double cross =
      -2.0 * (sys_.C * blocks.X * reduced.C.transpose()).value() -
      2.0 * (blocks.X.transpose() * sys_.M * blocks.X * reduced.M).trace();
  const double tail =
      (reduced.C * blocks.Pr * reduced.C.transpose()).value() +
      (reduced.M * blocks.Pr * reduced.M * blocks.Pr).trace();
  return cross + tail;
}

double H2Objective::shifted_cost(const LqoSystem& reduced) const {
  if (reduced.inputs() != sys_.inputs()) {
    throw shape_error("shifted_cost: input count mismatch");
  }
  if (!reduced_stable(reduced)) {
    return std::numeric_limits<double>::infinity();
  }
  return shifted_cost_from(reduced, cost_blocks(reduced));
}

GradientWorkspace H2Objective::solve_workspace(const LqoSystem& reduced) const {
  if (reduced.inputs() != sys_.inputs()) {
    throw shape_error("solve_workspace: input count mismatch");
  }
  if (!reduced_stable(reduced)) {
    throw solver_error("solve_workspace: unstable reduced model");
  }
  GradientWorkspace ws;
  const SchurForm sr = real_schur(reduced.A);
  const SchurForm srt = transposed_schur(sr);
  ws.Pr = solve_lyapunov(sr, srt, reduced.B * reduced.B.transpose());
  ws.L = solve_lyapunov(
      srt, sr,
      (reduced.C.transpose() * reduced.C +
       2.0 * reduced.M * ws.Pr * reduced.M)
          .eval());
  if (backend_.mode == SolverBackend::Mode::laguerre) {
    const ReducedFactors rf(reduced, laguerre_cfg_);
    ws.X = approx_X(*factors_, rf);
    ws.K = approx_K(*factors_, rf);
  } else {
    ws.X = solve_sylvester(schur_a_, srt, sys_.B * reduced.B.transpose());
    ws.K = solve_sylvester(
        schur_at_, sr,
        (-sys_.C.transpose() * reduced.C - 2.0 * sys_.M * ws.X * reduced.M)
            .eval());
  }
  return ws;
}

double H2Objective::cost_j1(const StiefelPoint& V) const {
  const LqoSystem reduced = galerkin_reduce(sys_, V);
  if (!reduced_stable(reduced)) {
    return std::numeric_limits<double>::infinity();
  }
  return shifted_cost_from(reduced, cost_blocks(reduced));
}

Matrix H2Objective::grad_j1(const StiefelPoint& V) const {
  const LqoSystem reduced = galerkin_reduce(sys_, V);
  if (!reduced_stable(reduced)) {
    throw solver_error("grad_j1: unstable reduced model");
  }
  const GradientWorkspace ws = solve_workspace(reduced);
  const Matrix& Vm = V.matrix();
  const Matrix S = ws.X.transpose() * ws.K + ws.Pr * ws.L;
  Matrix euclidean =
      sys_.A.transpose() * (Vm * S.transpose()) + sys_.A * (Vm * S);
  euclidean.noalias() +=
      sys_.B * (reduced.B.transpose() * ws.L + sys_.B.transpose() * ws.K);
  euclidean.noalias() +=
      sys_.C.transpose() * (reduced.C * ws.Pr - sys_.C * ws.X);
  euclidean.noalias() +=
      2.0 * sys_.M * Vm *
      (ws.Pr * reduced.M * ws.Pr - ws.X.transpose() * sys_.M * ws.X);
  euclidean *= 2.0;
  return project_tangent(V, euclidean);
}

double H2Objective::cost_j2(const ProductPoint& point) const {
  const Matrix& Um = point.U.matrix();
  const LqoSystem reduced(Um.transpose() * sys_.A * Um, point.B, point.C,
                          point.M);
  if (!reduced_stable(reduced)) {
    return std::numeric_limits<double>::infinity();
  }
  return shifted_cost_from(reduced, cost_blocks(reduced));
}

ProductTangent H2Objective::grad_j2(const ProductPoint& point) const {
  const Matrix& Um = point.U.matrix();
  const LqoSystem reduced(Um.transpose() * sys_.A * Um, point.B, point.C,
                          point.M);
  if (!reduced_stable(reduced)) {
    throw solver_error("grad_j2: unstable reduced model");
  }
  const GradientWorkspace ws = solve_workspace(reduced);
  const Matrix S = ws.X.transpose() * ws.K + ws.Pr * ws.L;
  const Matrix u_part =
      sys_.A.transpose() * (Um * S.transpose()) + sys_.A * (Um * S);
  const Matrix b_part = ws.K.transpose() * sys_.B + ws.L * reduced.B;
  const Matrix c_part = reduced.C * ws.Pr - sys_.C * ws.X;
  const Matrix m_part =
      ws.Pr * reduced.M * ws.Pr - ws.X.transpose() * sys_.M * ws.X;
  ProductTangent grad = product_project(point, u_part, b_part, c_part, m_part);
  return product_scaled(grad, 2.0);
}

double H2Objective::constant_term() const {
  if (!constant_term_) {
    const Matrix Q = observability_gramian(sys_);
    constant_term_ = (sys_.B.transpose() * Q * sys_.B).trace();
  }
  return *constant_term_;
}

}  // namespace lqomor
