// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include "lqomor/laguerre.hpp"
#include "lqomor/lqo_system.hpp"
#include "lqomor/stiefel.hpp"

namespace lqomor {

/// Reduced model (V'AV, V'B, CV, V'MV) of a column-orthonormal V.
LqoSystem galerkin_reduce(const LqoSystem& sys, const StiefelPoint& V);

/// Galerkin embedding of V as a point on the product manifold.
ProductPoint galerkin_embedding(const LqoSystem& sys, const StiefelPoint& V);

/// Coupled Sylvester solutions behind one cost/gradient evaluation:
///   A X  + X Ar'  + B Br'             = 0
///   Ar Pr + Pr Ar' + Br Br'           = 0
///   A' K + K Ar  - C' Cr - 2 M X Mr   = 0
///   Ar' L + L Ar + Cr' Cr + 2 Mr Pr Mr = 0
struct GradientWorkspace {
  Matrix X;   // n x r
  Matrix Pr;  // r x r, symmetric
  Matrix K;   // n x r
  Matrix L;   // r x r, symmetric
};

/// Choice of solver for the order-n Sylvester equations (X and K). The
/// order-r equations are always solved exactly.
struct SolverBackend {
  enum class Mode { exact, laguerre };
  Mode mode = Mode::exact;
  double alpha = 0.0;  // laguerre time-scale factor; <= 0 selects pick_alpha
  int terms = 32;      // laguerre truncation length

  static SolverBackend exact() { return {}; }
  static SolverBackend laguerre(double alpha, int terms) {
    return {Mode::laguerre, alpha, terms};
  }
};

/// Shifted H2 cost and Riemannian gradients for a fixed full-order system.
/// The cost omits the constant tr(B'QB); adding constant_term() back gives
/// the squared H2 error. Full-order factorizations (Schur forms in exact
/// mode, Laguerre factors otherwise) are computed once per instance.
class H2Objective {
 public:
  H2Objective(LqoSystem sys, SolverBackend backend = SolverBackend::exact());

  const LqoSystem& system() const { return sys_; }
  const SolverBackend& backend() const { return backend_; }
  double laguerre_alpha() const { return laguerre_cfg_.alpha; }

  /// +inf when the reduced model is unstable (line-search rejection signal).
  double shifted_cost(const LqoSystem& reduced) const;
  /// Throws solver_error at an unstable reduced model.
  GradientWorkspace solve_workspace(const LqoSystem& reduced) const;

  double cost_j1(const StiefelPoint& V) const;
  Matrix grad_j1(const StiefelPoint& V) const;

  double cost_j2(const ProductPoint& point) const;
  ProductTangent grad_j2(const ProductPoint& point) const;

  /// tr(B'QB), evaluated lazily and cached.
  double constant_term() const;

 private:
  struct CostBlocks {
    Matrix X;
    Matrix Pr;
  };
  bool reduced_stable(const LqoSystem& reduced) const;
  CostBlocks cost_blocks(const LqoSystem& reduced) const;
  double shifted_cost_from(const LqoSystem& reduced, const CostBlocks&) const;

  LqoSystem sys_;
  SolverBackend backend_;
  SchurForm schur_a_;
  SchurForm schur_at_;
  LaguerreConfig laguerre_cfg_;
  std::optional<FullOrderFactors> factors_;
  mutable std::optional<double> constant_term_;
};

}  // namespace lqomor
