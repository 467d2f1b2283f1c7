#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "ssem/constraint.hpp"
#include "ssem/kernel_table.hpp"

namespace ssem {

struct PcgOptions {
  double tol = 1e-10;   // on the preconditioned relative residual
  int max_iter = 500;
  std::filesystem::path kernel_cache_dir;  // empty: rebuild, no caching
};

struct PcgReport {
  Field u;
  int iterations = 0;
  double final_relative_residual = 0.0;
  double precond_build_seconds = 0.0;
  double iterate_seconds = 0.0;
  // lambda_max / lambda_min of the CG tridiagonal (Ritz values); an
  // estimate of the preconditioned operator's condition number, 0 when
  // fewer than two iterations ran
  double condition_estimate = 0.0;
  std::vector<double> residual_history;
};

/// Boundary preconditioner block: the kernel matrix
/// [C3]_ij = (2 pi / m)^d h(y_i - y_j) with differences wrapped into the
/// torus and h read from the table by cubic interpolation.
Eigen::MatrixXd boundary_preconditioner_matrix(const KernelTable& table,
                                               const BoundaryDiscretization& boundary,
                                               int m);

/// Direct inverse of the kernel matrix. Fails if the matrix is not
/// numerically SPD (a sign the boundary density is too high).
Eigen::MatrixXd assemble_boundary_preconditioner(const KernelTable& table,
                                                 const BoundaryDiscretization& boundary,
                                                 int m);

/// Compact-stencil operator (1 - Delta_Omega)^(p-2) on interior values:
/// identity for p = 2, one or two stencil applications for p = 3, 4.
/// Neighbors outside Omega are dropped from the stencil sum; the diagonal
/// keeps the full 2d/s^2 weight.
std::vector<double> apply_interior_preconditioner(std::span<const double> lambda_a,
                                                  int p, const Grid& grid,
                                                  const InteriorIndexSet& interior);

/// Matrix-free conjugate gradients on (C S_p^{-1} C^T) Lambda = b with the
/// block-diagonal preconditioner above, then u = S_p^{-1} C^T Lambda.
/// Supports p in {2, 3, 4}. Pure Neumann solutions are normalized by
/// subtracting the value at the origin.
PcgReport pcg_solve(const ConstraintSystem& sys, int p, const PcgOptions& options = {});

}  // namespace ssem
