// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <vector>

#include "lqomor/gradients.hpp"

namespace lqomor {

struct OptimizerConfig {
  double omega = 0.8;    // backtracking base, in (0,1)
  double gamma = 1.0;    // initial step scale, > 0
  double c1 = 0.25;      // sufficient-decrease constant
  double c2 = 0.95;      // curvature constant, c1 < c2 < 1
  double epsilon = 1e-3; // stop when ||g_k||/||g_0|| < epsilon
  int max_iters = 500;
  // The trial grid omega^m gamma must reach below the Wolfe window even for
  // large gamma and badly scaled directions; 200 trials bottom out near
  // 1e-20 gamma at omega = 0.8.
  int max_ls_trials = 200;

  void validate() const;
};

enum class StopReason { converged, max_iters, line_search_failed };
const char* to_string(StopReason reason);

struct TraceRow {
  int k = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double grad_rel = 0.0;
  double step = 0.0;    // accepted step that arrived at iterate k
  double beta = 0.0;    // conjugation parameter used in the direction at k
  int ls_trials = 0;    // accepted line-search exponent m_k (t = omega^m gamma)
  double wall_ms = 0.0; // cumulative, excluded from determinism checks
};

struct RunTrace {
  std::vector<TraceRow> rows;
  StopReason reason = StopReason::max_iters;
  int restarts = 0;

  int iterations() const { return rows.empty() ? 0 : rows.back().k; }
  double final_cost() const { return rows.empty() ? 0.0 : rows.back().cost; }
  // Column order: k,cost,grad_norm,grad_rel,step,beta,ls_trials,wall_ms
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

/// Dai-Yuan conjugation parameter
///   beta = ||g_k||^2 / (<g_k, T(eta_{k-1})> - <g_{k-1}, eta_{k-1}>).
/// A near-zero denominator signals a restart (beta = 0, steepest descent).
struct DyBeta {
  double value = 0.0;
  bool restart = false;
};
DyBeta dy_beta(double grad_norm_sq, double grad_dot_transported,
               double prev_grad_dot_dir);

/// Riemannian CG with Wolfe backtracking over any geometry providing
/// Point/Tangent types, inner products, retraction and vector transport.
template <class Geometry, class CostFn, class GradFn>
std::pair<typename Geometry::Point, RunTrace> riemannian_cg(
    const Geometry& geo, const CostFn& cost, const GradFn& grad,
    typename Geometry::Point x0, const OptimizerConfig& cfg,
    const std::function<void(int, const typename Geometry::Point&)>& observer =
        {}) {
  using Point = typename Geometry::Point;
  using Tangent = typename Geometry::Tangent;
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  RunTrace trace;
  Point x = std::move(x0);
  double cost_x = cost(x);
  if (!std::isfinite(cost_x)) {
    throw solver_error("riemannian_cg: initial point is infeasible");
  }
  Tangent g = grad(x);
  const double g0_norm = std::sqrt(geo.inner(x, g, g));
  trace.rows.push_back({0, cost_x, g0_norm, g0_norm > 0.0 ? 1.0 : 0.0, 0.0,
                        0.0, 0, elapsed_ms()});
  if (observer) observer(0, x);
  if (g0_norm == 0.0 || 1.0 < cfg.epsilon) {
    trace.reason = StopReason::converged;
    return {std::move(x), std::move(trace)};
  }

  Tangent eta = geo.scaled(g, -1.0);
  double g_dot_eta = -g0_norm * g0_norm;
  trace.reason = StopReason::max_iters;

  for (int k = 0; k < cfg.max_iters; ++k) {
    if (g_dot_eta >= 0.0) {  // not a descent direction: steepest-descent reset
      eta = geo.scaled(g, -1.0);
      g_dot_eta = -geo.inner(x, g, g);
      ++trace.restarts;
    }
    const double eta_norm = std::sqrt(geo.inner(x, eta, eta));

    bool accepted = false;
    int m_accept = 0;
    double t_accept = 0.0;
    Point x_next = x;
    double cost_next = cost_x;
    Tangent g_next = g;
    Tangent transported = eta;
    for (int m = 0; m < cfg.max_ls_trials; ++m) {
      const double t = std::pow(cfg.omega, m) * cfg.gamma;
      Point xt = geo.retract(x, geo.scaled(eta, t));
      const double ct = cost(xt);
      if (!std::isfinite(ct)) continue;  // unstable trial model: reject
      if (ct > cost_x + cfg.c1 * t * g_dot_eta) continue;
      Tangent Teta = geo.transport(x, geo.scaled(eta, t), eta);
      const double t_norm = std::sqrt(geo.inner(xt, Teta, Teta));
      if (t_norm > eta_norm && t_norm > 0.0) {
        Teta = geo.scaled(Teta, eta_norm / t_norm);  // deflation
      }
      Tangent gt = grad(xt);
      if (geo.inner(xt, gt, Teta) < cfg.c2 * g_dot_eta) continue;
      accepted = true;
      m_accept = m;
      t_accept = t;
      x_next = std::move(xt);
      cost_next = ct;
      g_next = std::move(gt);
      transported = std::move(Teta);
      break;
    }
    if (!accepted) {
      trace.reason = StopReason::line_search_failed;
      break;
    }

    const double g_next_sq = geo.inner(x_next, g_next, g_next);
    DyBeta beta = dy_beta(g_next_sq,
                          geo.inner(x_next, g_next, transported), g_dot_eta);
    if (beta.restart) ++trace.restarts;
    Tangent eta_next = geo.combine(-1.0, g_next, beta.value, transported);
    double g_dot_eta_next = geo.inner(x_next, g_next, eta_next);
    if (g_dot_eta_next >= 0.0) {
      eta_next = geo.scaled(g_next, -1.0);
      g_dot_eta_next = -g_next_sq;
      beta.value = 0.0;
      ++trace.restarts;
    }

    x = std::move(x_next);
    cost_x = cost_next;
    g = std::move(g_next);
    eta = std::move(eta_next);
    g_dot_eta = g_dot_eta_next;

    const double g_norm = std::sqrt(g_next_sq);
    trace.rows.push_back({k + 1, cost_x, g_norm, g_norm / g0_norm, t_accept,
                          beta.value, m_accept, elapsed_ms()});
    if (observer) observer(k + 1, x);
    if (g_norm / g0_norm < cfg.epsilon) {
      trace.reason = StopReason::converged;
      break;
    }
  }
  return {std::move(x), std::move(trace)};
}

struct StiefelGeometry {
  using Point = StiefelPoint;
  using Tangent = Matrix;
  double inner(const Point&, const Tangent& a, const Tangent& b) const {
    return (a.array() * b.array()).sum();
  }
  Point retract(const Point& V, const Tangent& eta) const {
    return lqomor::retract(V, eta);
  }
  Tangent transport(const Point& V, const Tangent& along,
                    const Tangent& v) const {
    return lqomor::transport(V, along, v);
  }
  Tangent scaled(const Tangent& v, double a) const { return a * v; }
  Tangent combine(double a, const Tangent& x, double b,
                  const Tangent& y) const {
    return a * x + b * y;
  }
};

struct ProductGeometry {
  using Point = ProductPoint;
  using Tangent = ProductTangent;
  double inner(const Point&, const Tangent& a, const Tangent& b) const {
    return product_inner(a, b);
  }
  Point retract(const Point& p, const Tangent& xi) const {
    return product_retract(p, xi);
  }
  Tangent transport(const Point& p, const Tangent& along,
                    const Tangent& v) const {
    return product_transport(p, along, v);
  }
  Tangent scaled(const Tangent& v, double a) const {
    return product_scaled(v, a);
  }
  Tangent combine(double a, const Tangent& x, double b,
                  const Tangent& y) const {
    return product_combine(a, x, b, y);
  }
};

struct SrcgResult {
  LqoSystem reduced;
  StiefelPoint projection;
  RunTrace trace;
};

/// Algorithm: conjugate-gradient minimization of the Galerkin H2 cost over
/// the Stiefel manifold, starting from V0.
SrcgResult srcg(const LqoSystem& sys, const StiefelPoint& V0,
                const OptimizerConfig& cfg,
                const SolverBackend& backend = SolverBackend::exact(),
                const std::function<void(int, const StiefelPoint&)>& observer =
                    {});

struct PrcgResult {
  LqoSystem reduced;
  ProductPoint point;
  RunTrace trace;
};

/// Same iteration over the product manifold, with B, C, M free. The
/// overload taking V0 starts from its Galerkin embedding.
PrcgResult prcg(const LqoSystem& sys, const ProductPoint& P0,
                const OptimizerConfig& cfg,
                const SolverBackend& backend = SolverBackend::exact(),
                const std::function<void(int, const ProductPoint&)>& observer =
                    {});
PrcgResult prcg(const LqoSystem& sys, const StiefelPoint& V0,
                const OptimizerConfig& cfg,
                const SolverBackend& backend = SolverBackend::exact(),
                const std::function<void(int, const ProductPoint&)>& observer =
                    {});

}  // namespace lqomor
