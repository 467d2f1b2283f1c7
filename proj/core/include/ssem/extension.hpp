#pragma once

#include <filesystem>

#include "ssem/constraint.hpp"
#include "ssem/pcg_solver.hpp"
#include "ssem/qr_solver.hpp"

namespace ssem {

enum class SolverKind { qr, pcg };

struct ExtensionOptions {
  SolverKind solver = SolverKind::qr;
  double tol = 1e-10;
  int max_iter = 500;
  std::filesystem::path kernel_cache_dir;
};

/// Minimal-H^p periodic extension: returns the field on the full box that
/// matches `interior_values` on the nodes inside the domain and minimizes
/// |(1 - Delta)^{p/2} u|_2 among all discrete fields doing so. The
/// constraint operator is plain restriction; either solve path applies.
Field extend(const Grid& grid, const DomainSpec& domain,
             std::span<const double> interior_values, int p,
             const ExtensionOptions& options = {});

/// L2(box) norm of the s-th gradient tensor of the trigonometric
/// interpolant: sqrt( (2 pi)^d / N^2 * sum_k |k|^{2s} |u_k|^2 ), the
/// multinomial-weighted Frobenius norm over all order-s derivatives.
double sobolev_seminorm(const Field& f, int s);

}  // namespace ssem
