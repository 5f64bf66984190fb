// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lqomor/optimizer.hpp"
#include "test_support.hpp"

using namespace lqomor;
using testsup::random_stiefel;
using testsup::random_system;

namespace {

// Plain Euclidean line for exercising the generic driver against textbook
// backtracking arithmetic.
struct LineGeometry {
  using Point = double;
  using Tangent = double;
  double inner(const Point&, const Tangent& a, const Tangent& b) const {
    return a * b;
  }
  Point retract(const Point& x, const Tangent& v) const { return x + v; }
  Tangent transport(const Point&, const Tangent&, const Tangent& v) const {
    return v;
  }
  Tangent scaled(const Tangent& v, double a) const { return a * v; }
  Tangent combine(double a, const Tangent& x, double b, const Tangent& y) const {
    return a * x + b * y;
  }
};

}  // namespace

TEST_CASE("dy_beta") {
  SUBCASE("textbook arithmetic") {
    // <g_k, T(eta)> = 0.5||g||^2 and <g_prev, eta_prev> = -0.5||g||^2
    // make the denominator ||g||^2, so beta = 1.
    const DyBeta beta = dy_beta(4.0, 2.0, -2.0);
    CHECK_FALSE(beta.restart);
    CHECK(beta.value == doctest::Approx(1.0));
  }
  SUBCASE("tiny denominator requests a restart") {
    const DyBeta beta = dy_beta(1.0, 0.5, 0.5 - 1e-16);
    CHECK(beta.restart);
    CHECK(beta.value == 0.0);
  }
}

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  cfg.omega = 1.5;
  CHECK_THROWS_AS(cfg.validate(), shape_error);
  cfg = {};
  cfg.c1 = 0.9;
  cfg.c2 = 0.5;
  CHECK_THROWS_AS(cfg.validate(), shape_error);
  cfg = {};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("wolfe backtracking count on a 1-D quadratic") {
  // f(x) = x^2 from x = 1 along eta = -2 (the gradient direction):
  // f(1 + t*(-2)) = (1 - 2t)^2, slope s = <g, eta> = -4.
  // Wolfe-1: (1-2t)^2 <= 1 - 4 c1 t  <=>  t <= (1 - c1).
  // Wolfe-2: -2(1-2t)(-2)... grad at trial = 2(1-2t), inner with eta:
  //   -4(1-2t) >= -4 c2  <=>  t >= (1 - c2)/2.
  // With gamma = 4, omega = 0.5, c1 = 0.25, c2 = 0.9: Wolfe window is
  // [0.05, 0.75], trials t = 4, 2, 1, 0.5 -> accepted at m = 3.
  LineGeometry geo;
  OptimizerConfig cfg;
  cfg.omega = 0.5;
  cfg.gamma = 4.0;
  cfg.c1 = 0.25;
  cfg.c2 = 0.9;
  cfg.epsilon = 1e-9;
  cfg.max_iters = 1;
  auto cost = [](double x) { return x * x; };
  auto grad = [](double x) { return 2.0 * x; };
  auto [x, trace] = riemannian_cg(geo, cost, grad, 1.0, cfg);
  REQUIRE(trace.rows.size() == 2);
  CHECK(trace.rows[1].ls_trials == 3);
  CHECK(trace.rows[1].step == doctest::Approx(0.5));
  CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("huge epsilon returns the initial point after zero iterations") {
  Rng rng(601);
  const LqoSystem sys = random_system(rng, 12, 1);
  OptimizerConfig cfg;
  cfg.epsilon = 2.0;
  const StiefelPoint V0 = random_stiefel(rng, 12, 3);
  const SrcgResult res = srcg(sys, V0, cfg);
  CHECK(res.trace.reason == StopReason::converged);
  CHECK(res.trace.iterations() == 0);
  CHECK(res.projection.matrix() == V0.matrix());

  const PrcgResult pres = prcg(sys, V0, cfg);
  CHECK(pres.trace.iterations() == 0);
  const H2Objective obj(sys);
  CHECK(pres.trace.final_cost() == doctest::Approx(obj.cost_j1(V0)).epsilon(1e-12));
}

TEST_CASE("srcg on a small synthetic system") {
  const LqoSystem sys = gen_synthetic(20, 3);
  OptimizerConfig cfg;
  cfg.omega = 0.8;
  cfg.gamma = 1.0;
  cfg.c1 = 0.25;
  cfg.c2 = 0.95;
  cfg.epsilon = 1e-3;
  cfg.max_iters = 150;
  Rng rng(607);
  const StiefelPoint V0 = random_stiefel(rng, 20, 4);

  std::vector<double> orth_defects;
  const SrcgResult res = srcg(sys, V0, cfg, SolverBackend::exact(),
                              [&](int, const StiefelPoint& V) {
                                orth_defects.push_back(V.orthonormality_defect());
                              });

  // Accepted iterates never increase the cost.
  for (size_t i = 1; i < res.trace.rows.size(); ++i) {
    CHECK(res.trace.rows[i].cost <=
          res.trace.rows[i - 1].cost +
              1e-12 * std::abs(res.trace.rows[i - 1].cost));
  }
  // Steps are exactly omega^m * gamma.
  for (size_t i = 1; i < res.trace.rows.size(); ++i) {
    const TraceRow& row = res.trace.rows[i];
    CHECK(row.step == std::pow(cfg.omega, row.ls_trials) * cfg.gamma);
  }
  for (double defect : orth_defects) CHECK(defect < 1e-10 * 2.0);
  CHECK(res.trace.rows.front().grad_rel == 1.0);
  CHECK(h2_norm(res.reduced) > 0.0);

  // The optimizer must improve on the starting point.
  CHECK(res.trace.final_cost() < res.trace.rows.front().cost);
}

TEST_CASE("identical runs produce bitwise-identical traces") {
  const LqoSystem sys = gen_synthetic(16, 9);
  OptimizerConfig cfg;
  cfg.epsilon = 1e-2;
  cfg.max_iters = 40;
  Rng rng(613);
  const StiefelPoint V0 = random_stiefel(rng, 16, 3);
  const SrcgResult a = srcg(sys, V0, cfg);
  const SrcgResult b = srcg(sys, V0, cfg);
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (size_t i = 0; i < a.trace.rows.size(); ++i) {
    CHECK(a.trace.rows[i].cost == b.trace.rows[i].cost);
    CHECK(a.trace.rows[i].grad_norm == b.trace.rows[i].grad_norm);
    CHECK(a.trace.rows[i].step == b.trace.rows[i].step);
    CHECK(a.trace.rows[i].beta == b.trace.rows[i].beta);
  }
  CHECK(a.projection.matrix() == b.projection.matrix());
}

TEST_CASE("trace CSV column order") {
  RunTrace trace;
  trace.rows.push_back({0, 1.5, 2.0, 1.0, 0.0, 0.0, 0, 3.25});
  std::ostringstream out;
  trace.write_csv(out);
  const std::string text = out.str();
  CHECK(text.rfind("k,cost,grad_norm,grad_rel,step,beta,ls_trials,wall_ms\n",
                   0) == 0);
  CHECK(text.find("0,1.5,2,1,0,0,0,3.25") != std::string::npos);
}

TEST_CASE("prcg starting from the Galerkin embedding improves the cost") {
  const LqoSystem sys = gen_synthetic(18, 5);
  OptimizerConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.max_iters = 120;
  Rng rng(617);
  const StiefelPoint V0 = random_stiefel(rng, 18, 4);
  const PrcgResult res = prcg(sys, V0, cfg);
  for (size_t i = 1; i < res.trace.rows.size(); ++i) {
    CHECK(res.trace.rows[i].cost <=
          res.trace.rows[i - 1].cost +
              1e-12 * std::abs(res.trace.rows[i - 1].cost));
  }
  const H2Objective obj(sys);
  CHECK(res.trace.final_cost() < obj.cost_j1(V0));
  CHECK(res.reduced.M == res.reduced.M.transpose());
}

TEST_CASE("initial unstable reduced model is rejected up front") {
  // A stable full system whose leading 1x1 Galerkin block is unstable:
  // A = [[0.5, 2], [-2, -1.5]] has eigenvalues with negative real part
  // (trace -1, det 3.25), but V = e1 gives Ar = [0.5].
  Matrix A(2, 2);
  A << 0.5, 2.0, -2.0, -1.5;
  REQUIRE(is_stable(A));
  const LqoSystem sys(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2),
                      Matrix::Identity(2, 2));
  Matrix e1(2, 1);
  e1 << 1.0, 0.0;
  OptimizerConfig cfg;
  CHECK_THROWS_AS(srcg(sys, StiefelPoint(e1), cfg), solver_error);
}
