#pragma once

#include <cstdint>

#include "ssem/constraint.hpp"

namespace ssem {

struct QrSolveReport {
  Field u;
  double constraint_residual_inf = 0.0;  // |Cu - b|_inf / (1 + |b|_inf)
  double smallest_R_diagonal = 0.0;
  // set when some |R_ii| < 1e-14 max_j |R_jj|; expected for pure Neumann
  // systems and very high smoother orders
  bool rank_warning = false;
  std::int64_t rank_warning_index = -1;
  double assembly_seconds = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Explicit-matrix solve: factor S_p^{-1/2} C^T = QR (plain Householder,
/// no pivoting) and evaluate u = S_p^{-1/2} Q R^{-T} b. Splitting the
/// smoother across the factorization halves the power each factor carries,
/// so orders up to p = 10 stay above machine precision.
///
/// p = 0 runs the unregularized minimum-Euclidean-norm solve (S = identity),
/// kept for demonstrating the boundary oscillations it produces.
///
/// Pure Neumann systems proceed through the near-singular direction and the
/// solution is normalized by subtracting its value at the origin.
QrSolveReport solve_qr(const ConstraintSystem& sys, int p);

/// Largest grid the explicit path accepts (node count by dimension:
/// 4096, 128^2, 48^3).
std::int64_t qr_dense_node_cap(int dim);

}  // namespace ssem
