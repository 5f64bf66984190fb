// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "lqomor/lqo_system.hpp"
#include "lqomor/stiefel.hpp"

namespace lqomor {

/// Orthonormal basis of the Krylov space span{B, AB, ..., A^{r-1}B},
/// built by the Arnoldi procedure with re-orthogonalization. Throws when
/// the sequence becomes dependent before reaching r columns, reporting the
/// achieved dimension.
StiefelPoint arnoldi_basis(const Matrix& A, const Matrix& B, Index r);

/// Orthonormal basis of span{(s_i I - A)^{-1} B}, one block per shift.
StiefelPoint rational_krylov_basis(const Matrix& A, const Matrix& B,
                                   const std::vector<double>& shifts);

/// Uniformly sampled state snapshots and their generating input.
struct SnapshotSet {
  Vector times;            // s sample times
  Matrix states;           // n x s
  std::string input_desc;  // human-readable description of u(t)

  Index samples() const { return states.cols(); }
};

/// Samples the state trajectory at `samples` uniformly spaced times covering
/// [0, t_end], integrating on a finer grid where needed.
SnapshotSet collect_snapshots(const LqoSystem& sys,
                              const std::function<double(double)>& input,
                              double t_end, int samples,
                              const std::string& input_desc);

void save_snapshots(const SnapshotSet& snap, const std::string& dir);
SnapshotSet load_snapshots(const std::string& dir);

/// First r left singular vectors of the snapshot matrix, with the largest
/// entry of every mode forced positive.
StiefelPoint pod_basis(const SnapshotSet& snap, Index r);

struct BtInfo {
  Vector hankel;        // all Hankel singular values
  Index requested = 0;
  Index effective = 0;  // r after truncation at 1e-14 * hankel(0)
};

/// Square-root balanced truncation with the quadratic-output observability
/// Gramian participating in the balancing. M_r = V'MV (symmetrized).
LqoSystem bt_reduce(const LqoSystem& sys, Index r, BtInfo* info = nullptr);

}  // namespace lqomor
