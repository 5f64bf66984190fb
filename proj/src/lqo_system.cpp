// SPDX-License-Identifier: Apache-2.0
#include "lqomor/lqo_system.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "lqomor/matrix_market.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace lqomor {

LqoSystem::LqoSystem(Matrix A_, Matrix B_, Matrix C_, Matrix M_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), M(std::move(M_)) {
  const Index n = A.rows();
  if (A.cols() != n) throw shape_error("LqoSystem: A not square");
  if (B.rows() != n) throw shape_error("LqoSystem: B row count");
  if (C.rows() != 1 || C.cols() != n) throw shape_error("LqoSystem: C must be 1 x n");
  if (M.rows() != n || M.cols() != n) throw shape_error("LqoSystem: M shape");
  require_finite(A, "LqoSystem.A");
  require_finite(B, "LqoSystem.B");
  require_finite(C, "LqoSystem.C");
  require_finite(M, "LqoSystem.M");
  M = 0.5 * (M + M.transpose()).eval();
}

Matrix controllability_gramian(const LqoSystem& sys) {
  return solve_lyapunov(sys.A, sys.B * sys.B.transpose());
}

Matrix observability_gramian(const LqoSystem& sys) {
  const Matrix P = controllability_gramian(sys);
  const Matrix rhs = sys.C.transpose() * sys.C + sys.M * P * sys.M;
  return solve_lyapunov(sys.A.transpose(), rhs);
}

double h2_norm(const LqoSystem& sys) {
  if (!is_stable(sys.A)) {
    throw solver_error("h2_norm: unstable system has infinite H2 norm");
  }
  const Matrix Q = observability_gramian(sys);
  const double sq = (sys.B.transpose() * Q * sys.B).trace();
  return std::sqrt(std::max(sq, 0.0));
}

LqoSystem error_system(const LqoSystem& full, const LqoSystem& reduced) {
  if (full.inputs() != reduced.inputs()) {
    throw shape_error("error_system: input count mismatch");
  }
  const Index n = full.order();
  const Index r = reduced.order();
  Matrix A = Matrix::Zero(n + r, n + r);
  A.topLeftCorner(n, n) = full.A;
  A.bottomRightCorner(r, r) = reduced.A;
  Matrix B(n + r, full.inputs());
  B.topRows(n) = full.B;
  B.bottomRows(r) = reduced.B;
  Matrix C(1, n + r);
  C.leftCols(n) = full.C;
  C.rightCols(r) = -reduced.C;
  Matrix M = Matrix::Zero(n + r, n + r);
  M.topLeftCorner(n, n) = full.M;
  M.bottomRightCorner(r, r) = -reduced.M;
  return LqoSystem(std::move(A), std::move(B), std::move(C), std::move(M));
}

H2ErrorBlocks h2_error_blocks(const LqoSystem& full, const LqoSystem& reduced) {
  if (full.inputs() != reduced.inputs()) {
    throw shape_error("h2_error_blocks: input count mismatch");
  }
  if (!is_stable(full.A)) {
    throw solver_error("h2_error_blocks: unstable full system");
  }
  H2ErrorBlocks blocks;
  if (!is_stable(reduced.A)) {
    blocks.error_sq = std::numeric_limits<double>::infinity();
    return blocks;
  }
  const SchurForm sa = real_schur(full.A);
  const SchurForm sat = transposed_schur(sa);
  const SchurForm sr = real_schur(reduced.A);
  const SchurForm srt = transposed_schur(sr);

  blocks.X = solve_sylvester(sa, srt, full.B * reduced.B.transpose());
  blocks.Pr = solve_lyapunov(sr, srt, reduced.B * reduced.B.transpose());
  blocks.Y = solve_sylvester(
      sat, sr,
      (-full.C.transpose() * reduced.C - full.M * blocks.X * reduced.M).eval());
  blocks.Qr = solve_lyapunov(
      srt, sr,
      (reduced.C.transpose() * reduced.C + reduced.M * blocks.Pr * reduced.M).eval());

  const Matrix Q = observability_gramian(full);
  const double j = (full.B.transpose() * Q * full.B).trace() +
                   2.0 * (full.B.transpose() * blocks.Y * reduced.B).trace() +
                   (reduced.B.transpose() * blocks.Qr * reduced.B).trace();
  blocks.error_sq = j;
  return blocks;
}

double relative_h2_error(const LqoSystem& full, const LqoSystem& reduced) {
  const H2ErrorBlocks blocks = h2_error_blocks(full, reduced);
  if (!std::isfinite(blocks.error_sq)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::sqrt(std::max(blocks.error_sq, 0.0)) / h2_norm(full);
}

Trajectory simulate(const LqoSystem& sys, const InputSignal& input,
                    double t_end, int steps) {
  if (steps < 2) throw shape_error("simulate: steps must be >= 2");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw shape_error("simulate: t_end must be positive and finite");
  }
  const Index n = sys.order();
  const double h = t_end / steps;

  auto sample = [&](double t) {
    Vector u = input(t);
    if (u.size() != sys.inputs()) {
      throw shape_error("simulate: input sample size mismatch");
    }
    if (!u.allFinite()) throw shape_error("simulate: non-finite input sample");
    return u;
  };

  Trajectory out;
  out.times = Vector::LinSpaced(steps + 1, 0.0, t_end);
  out.output = Vector::Zero(steps + 1);
  out.states = Matrix::Zero(n, steps + 1);

  Vector x = Vector::Zero(n);
  auto record = [&](int k) {
    out.states.col(k) = x;
    out.output(k) = (sys.C * x).value() + x.dot(sys.M * x);
  };
  record(0);

  Vector k1(n), k2(n), k3(n), k4(n);
  for (int k = 0; k < steps; ++k) {
    const double t = out.times(k);
    const Vector u0 = sample(t);
    const Vector uh = sample(t + 0.5 * h);
    const Vector u1 = sample(t + h);
    k1 = sys.A * x + sys.B * u0;
    k2 = sys.A * (x + 0.5 * h * k1) + sys.B * uh;
    k3 = sys.A * (x + 0.5 * h * k2) + sys.B * uh;
    k4 = sys.A * (x + h * k3) + sys.B * u1;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(k + 1);
  }
  return out;
}

Trajectory simulate(const LqoSystem& sys,
                    const std::function<double(double)>& input, double t_end,
                    int steps) {
  const Index m = sys.inputs();
  return simulate(
      sys,
      [&input, m](double t) { return Vector::Constant(m, input(t)); },
      t_end, steps);
}

void save_system(const LqoSystem& sys, const std::string& dir,
                 const std::string& label, const std::string& metadata_json) {
  fs::create_directories(dir);
  write_matrix_market(dir + "/A.mtx", sys.A);
  write_matrix_market(dir + "/B.mtx", sys.B);
  write_matrix_market(dir + "/C.mtx", sys.C);
  write_matrix_market(dir + "/M.mtx", sys.M);
  json j;
  j["order"] = sys.order();
  j["inputs"] = sys.inputs();
  j["label"] = label;
  if (!metadata_json.empty()) j["generator"] = json::parse(metadata_json);
  std::ofstream out(dir + "/system.json");
  if (!out) throw shape_error("save_system: cannot write " + dir);
  out << j.dump(2) << "\n";
}

LqoSystem load_system(const std::string& dir) {
  std::ifstream in(dir + "/system.json");
  if (!in) throw shape_error("load_system: missing system.json in " + dir);
  json j = json::parse(in);
  LqoSystem sys(read_matrix_market(dir + "/A.mtx"),
                read_matrix_market(dir + "/B.mtx"),
                read_matrix_market(dir + "/C.mtx"),
                read_matrix_market(dir + "/M.mtx"));
  if (j.contains("order") && j["order"].get<Index>() != sys.order()) {
    throw shape_error("load_system: descriptor order mismatch in " + dir);
  }
  if (j.contains("inputs") && j["inputs"].get<Index>() != sys.inputs()) {
    throw shape_error("load_system: descriptor input count mismatch in " + dir);
  }
  return sys;
}

}  // namespace lqomor
