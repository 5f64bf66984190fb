// SPDX-License-Identifier: Apache-2.0
#include "lqomor/optimizer.hpp"

#include <fstream>
#include <ostream>

#include "lqomor/matrix_market.hpp"

namespace lqomor {

void OptimizerConfig::validate() const {
  if (!(omega > 0.0 && omega < 1.0)) {
    throw shape_error("OptimizerConfig: omega must lie in (0,1)");
  }
  if (!(gamma > 0.0)) throw shape_error("OptimizerConfig: gamma must be > 0");
  if (!(0.0 < c1 && c1 < c2 && c2 < 1.0)) {
    throw shape_error("OptimizerConfig: need 0 < c1 < c2 < 1");
  }
  if (!(epsilon > 0.0)) throw shape_error("OptimizerConfig: epsilon must be > 0");
  if (max_iters < 1) throw shape_error("OptimizerConfig: max_iters must be >= 1");
  if (max_ls_trials < 1) {
    throw shape_error("OptimizerConfig: max_ls_trials must be >= 1");
  }
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::converged: return "converged";
    case StopReason::max_iters: return "k_max";
    case StopReason::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

void RunTrace::write_csv(std::ostream& out) const {
  out << "k,cost,grad_norm,grad_rel,step,beta,ls_trials,wall_ms\n";
  for (const TraceRow& row : rows) {
    out << row.k << ',' << fmt17(row.cost) << ',' << fmt17(row.grad_norm)
        << ',' << fmt17(row.grad_rel) << ',' << fmt17(row.step) << ','
        << fmt17(row.beta) << ',' << row.ls_trials << ','
        << fmt17(row.wall_ms) << '\n';
  }
}

void RunTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw shape_error("RunTrace: cannot open " + path);
  write_csv(out);
}

DyBeta dy_beta(double grad_norm_sq, double grad_dot_transported,
               double prev_grad_dot_dir) {
  const double denom = grad_dot_transported - prev_grad_dot_dir;
  if (std::abs(denom) < 1e-14 * grad_norm_sq) {
    return {0.0, true};
  }
  return {grad_norm_sq / denom, false};
}

SrcgResult srcg(const LqoSystem& sys, const StiefelPoint& V0,
                const OptimizerConfig& cfg, const SolverBackend& backend,
                const std::function<void(int, const StiefelPoint&)>& observer) {
  const H2Objective objective(sys, backend);
  if (!std::isfinite(objective.cost_j1(V0))) {
    throw solver_error("srcg: initial reduced model is unstable");
  }
  StiefelGeometry geo;
  auto [V, trace] = riemannian_cg(
      geo, [&](const StiefelPoint& p) { return objective.cost_j1(p); },
      [&](const StiefelPoint& p) { return objective.grad_j1(p); }, V0, cfg,
      observer);
  LqoSystem reduced = galerkin_reduce(sys, V);
  return {std::move(reduced), std::move(V), std::move(trace)};
}

PrcgResult prcg(const LqoSystem& sys, const ProductPoint& P0,
                const OptimizerConfig& cfg, const SolverBackend& backend,
                const std::function<void(int, const ProductPoint&)>& observer) {
  const H2Objective objective(sys, backend);
  if (!std::isfinite(objective.cost_j2(P0))) {
    throw solver_error("prcg: initial reduced model is unstable");
  }
  ProductGeometry geo;
  auto [point, trace] = riemannian_cg(
      geo, [&](const ProductPoint& p) { return objective.cost_j2(p); },
      [&](const ProductPoint& p) { return objective.grad_j2(p); }, P0, cfg,
      observer);
  const Matrix& Um = point.U.matrix();
  LqoSystem reduced(Um.transpose() * sys.A * Um, point.B, point.C, point.M);
  return {std::move(reduced), std::move(point), std::move(trace)};
}

PrcgResult prcg(const LqoSystem& sys, const StiefelPoint& V0,
                const OptimizerConfig& cfg, const SolverBackend& backend,
                const std::function<void(int, const ProductPoint&)>& observer) {
  return prcg(sys, galerkin_embedding(sys, V0), cfg, backend, observer);
}

}  // namespace lqomor
