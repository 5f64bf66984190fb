// SPDX-License-Identifier: Apache-2.0
#include "lqomor/baselines.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lqomor/matrix_market.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace lqomor {

namespace {

// Orthogonalize w against the accepted columns twice; returns false when
// the remainder is negligible (dependent candidate).
bool orthogonalize(const Matrix& Q, Index cols, Vector& w, double origin_norm) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < cols; ++j) {
      w -= Q.col(j).dot(w) * Q.col(j);
    }
  }
  const double norm = w.norm();
  if (norm <= 1e-10 * origin_norm || norm == 0.0) return false;
  w /= norm;
  return true;
}

// Gramian square root P = L L' through an eigendecomposition, dropping
// eigenvalues below max(lambda) * 1e-14 (Cholesky fails on semidefinite
// Gramians).
Matrix gramian_sqrt(const Matrix& P, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (P + P.transpose()));
  if (eig.info() != Eigen::Success) {
    throw solver_error(std::string(what) + ": eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  const double cutoff = lambda.cwiseAbs().maxCoeff() * 1e-14;
  std::vector<Index> keep;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > cutoff) keep.push_back(i);
  }
  if (keep.empty()) throw solver_error(std::string(what) + ": zero Gramian");
  Matrix L(P.rows(), static_cast<Index>(keep.size()));
  for (Index k = 0; k < static_cast<Index>(keep.size()); ++k) {
    L.col(k) = eig.eigenvectors().col(keep[static_cast<size_t>(k)]) *
               std::sqrt(lambda(keep[static_cast<size_t>(k)]));
  }
  return L;
}

}  // namespace

StiefelPoint arnoldi_basis(const Matrix& A, const Matrix& B, Index r) {
  const Index n = A.rows();
  if (A.cols() != n) throw shape_error("arnoldi_basis: A not square");
  if (B.rows() != n) throw shape_error("arnoldi_basis: B row mismatch");
  if (r < 1 || r > n) throw shape_error("arnoldi_basis: bad target dimension");

  Matrix Q(n, r);
  Index accepted = 0;
  Index expand = 0;  // next accepted column to multiply by A
  Index b_col = 0;

  while (accepted < r) {
    Vector w;
    if (b_col < B.cols()) {
      w = B.col(b_col++);
    } else if (expand < accepted) {
      w = A * Q.col(expand++);
    } else {
      throw solver_error("arnoldi_basis: breakdown, Krylov space has dimension " +
                         std::to_string(accepted));
    }
    const double origin_norm = w.norm();
    if (!orthogonalize(Q, accepted, w, origin_norm)) {
      throw solver_error("arnoldi_basis: dependent Krylov vector, achieved dimension " +
                         std::to_string(accepted));
    }
    Q.col(accepted++) = w;
  }
  return StiefelPoint(std::move(Q));
}

StiefelPoint rational_krylov_basis(const Matrix& A, const Matrix& B,
                                   const std::vector<double>& shifts) {
  const Index n = A.rows();
  if (A.cols() != n) throw shape_error("rational_krylov_basis: A not square");
  if (B.rows() != n) throw shape_error("rational_krylov_basis: B row mismatch");
  if (shifts.empty()) throw shape_error("rational_krylov_basis: no shifts");

  // Column-wise Gram-Schmidt instead of one QR over the whole block: stiff
  // spectra make resolvent directions severely ill conditioned, which is
  // tolerable for a subspace basis, while exact duplicates (remainder at
  // rounding level) still have to fail.
  Matrix Q(n, static_cast<Index>(shifts.size()) * B.cols());
  Index accepted = 0;
  for (Index k = 0; k < static_cast<Index>(shifts.size()); ++k) {
    const double s = shifts[static_cast<size_t>(k)];
    const Matrix shifted = s * Matrix::Identity(n, n) - A;
    Eigen::FullPivLU<Matrix> lu(shifted);
    if (!lu.isInvertible()) {
      throw solver_error("rational_krylov_basis: singular shift " +
                         std::to_string(s));
    }
    const Matrix block = lu.solve(B);
    for (Index j = 0; j < block.cols(); ++j) {
      Vector w = block.col(j);
      const double origin_norm = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (Index i = 0; i < accepted; ++i) {
          w -= Q.col(i).dot(w) * Q.col(i);
        }
      }
      if (w.norm() <= 1e-14 * origin_norm || w.norm() == 0.0) {
        throw solver_error(
            "rational_krylov_basis: rank deficient at shift " +
            std::to_string(s));
      }
      Q.col(accepted++) = w / w.norm();
    }
  }
  return StiefelPoint(std::move(Q));
}

SnapshotSet collect_snapshots(const LqoSystem& sys,
                              const std::function<double(double)>& input,
                              double t_end, int samples,
                              const std::string& input_desc) {
  if (samples < 2) throw shape_error("collect_snapshots: need >= 2 samples");
  // Integrate on a refinement of the sample grid so states land exactly on
  // the sample times. The refinement honors both a resolution floor and the
  // RK4 stability bound h ||A||_2 < 2.5 (stiff systems diverge otherwise).
  const double stability_steps = t_end * sys.A.operatorNorm() / 2.5;
  const int oversample = std::max(
      {1, 1000 / (samples - 1),
       static_cast<int>(std::ceil(stability_steps / (samples - 1)))});
  const int steps = oversample * (samples - 1);
  const Trajectory traj = simulate(sys, input, t_end, steps);

  SnapshotSet snap;
  snap.times = Vector::LinSpaced(samples, 0.0, t_end);
  snap.states = Matrix(sys.order(), samples);
  for (int j = 0; j < samples; ++j) {
    snap.states.col(j) = traj.states.col(static_cast<Index>(j) * oversample);
  }
  snap.input_desc = input_desc;
  return snap;
}

void save_snapshots(const SnapshotSet& snap, const std::string& dir) {
  fs::create_directories(dir);
  write_matrix_market(dir + "/states.mtx", snap.states);
  json j;
  j["samples"] = snap.samples();
  j["t_end"] = snap.times.size() > 0 ? snap.times(snap.times.size() - 1) : 0.0;
  j["input"] = snap.input_desc;
  std::ofstream out(dir + "/snapshots.json");
  if (!out) throw shape_error("save_snapshots: cannot write " + dir);
  out << j.dump(2) << "\n";
}

SnapshotSet load_snapshots(const std::string& dir) {
  std::ifstream in(dir + "/snapshots.json");
  if (!in) throw shape_error("load_snapshots: missing snapshots.json in " + dir);
  json j = json::parse(in);
  SnapshotSet snap;
  snap.states = read_matrix_market(dir + "/states.mtx");
  const double t_end = j.value("t_end", 0.0);
  snap.times = Vector::LinSpaced(snap.states.cols(), 0.0, t_end);
  snap.input_desc = j.value("input", std::string());
  return snap;
}

StiefelPoint pod_basis(const SnapshotSet& snap, Index r) {
  if (snap.samples() < r) {
    throw shape_error("pod_basis: fewer snapshots than requested modes");
  }
  Eigen::BDCSVD<Matrix> svd(snap.states, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  if (sigma.size() < r || sigma(r - 1) <= sigma(0) * 1e-12) {
    throw solver_error("pod_basis: degenerate snapshots, rank below " +
                       std::to_string(r));
  }
  Matrix U = svd.matrixU().leftCols(r);
  for (Index j = 0; j < r; ++j) {
    Index imax = 0;
    U.col(j).cwiseAbs().maxCoeff(&imax);
    if (U(imax, j) < 0.0) U.col(j) = -U.col(j);
  }
  return StiefelPoint(std::move(U));
}

LqoSystem bt_reduce(const LqoSystem& sys, Index r, BtInfo* info) {
  if (r < 1 || r > sys.order()) throw shape_error("bt_reduce: bad order");
  if (!is_stable(sys.A)) throw solver_error("bt_reduce: unstable system");

  const Matrix P = controllability_gramian(sys);
  const Matrix Q = observability_gramian(sys);
  const Matrix Lp = gramian_sqrt(P, "bt_reduce(P)");
  const Matrix Lq = gramian_sqrt(Q, "bt_reduce(Q)");

  Eigen::BDCSVD<Matrix> svd(Lq.transpose() * Lp,
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& hankel = svd.singularValues();

  Index r_eff = std::min<Index>(r, hankel.size());
  while (r_eff > 1 && hankel(r_eff - 1) < 1e-14 * hankel(0)) --r_eff;
  if (info) {
    info->hankel = hankel;
    info->requested = r;
    info->effective = r_eff;
  }

  const Matrix Z = svd.matrixU().leftCols(r_eff);
  const Matrix Y = svd.matrixV().leftCols(r_eff);
  const Vector scale =
      hankel.head(r_eff).cwiseSqrt().cwiseInverse();
  const Matrix W = Lq * Z * scale.asDiagonal();
  const Matrix V = Lp * Y * scale.asDiagonal();

  return LqoSystem(W.transpose() * sys.A * V, W.transpose() * sys.B,
                   sys.C * V, V.transpose() * sys.M * V);
}

}  // namespace lqomor
