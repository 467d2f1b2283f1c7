#include "ssem/qr_solver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ssem {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

std::int64_t qr_dense_node_cap(int dim) {
  switch (dim) {
    case 1: return 4096;
    case 2: return 128LL * 128LL;
    default: return 48LL * 48LL * 48LL;
  }
}

QrSolveReport solve_qr(const ConstraintSystem& sys, int p) {
  if (p < 0 || p > 10)
    fail(errc::unsupported_order, "QR path supports p in [0,10]");
  const Grid& grid = sys.grid();
  const std::int64_t n_rows = grid.size();
  const std::int64_t n_cols = sys.n_lambda();
  if (n_rows > qr_dense_node_cap(grid.dim()))
    fail(errc::too_large_for_dense,
         "grid too large for the explicit path; use the PCG solver");

  QrSolveReport report{Field(grid)};

  const auto& b = sys.rhs();
  if (all_zero(b)) return report;  // u = 0 exactly

  auto smooth_half = [&](const Field& f) {
    return p == 0 ? f : smoother_apply(f, p, SmootherPower::inverse_half);
  };

  // Assemble M = S_p^{-1/2} C^T column by column (column-major).
  const auto t_assembly = clock_type::now();
  std::vector<double> mat(static_cast<std::size_t>(n_rows) * n_cols);
  {
    std::vector<double> e(n_cols, 0.0);
    for (std::int64_t i = 0; i < n_cols; ++i) {
      e[i] = 1.0;
      const Field col = smooth_half(sys.apply_C_transpose(e));
      std::copy(col.values.begin(), col.values.end(), mat.begin() + i * n_rows);
      e[i] = 0.0;
    }
  }
  report.assembly_seconds = seconds_since(t_assembly);

  const auto t_factor = clock_type::now();
  std::vector<double> tau(n_cols);
  const lapack_int m_l = static_cast<lapack_int>(n_rows);
  const lapack_int n_l = static_cast<lapack_int>(n_cols);
  lapack_int info = LAPACKE_dgeqrf(LAPACK_COL_MAJOR, m_l, n_l, mat.data(), m_l, tau.data());
  if (info != 0) fail(errc::breakdown, "dgeqrf failed with info " + std::to_string(info));
  report.factor_seconds = seconds_since(t_factor);

  double max_diag = 0.0;
  for (std::int64_t i = 0; i < n_cols; ++i)
    max_diag = std::max(max_diag, std::abs(mat[i + i * n_rows]));
  report.smallest_R_diagonal = max_diag;
  for (std::int64_t i = 0; i < n_cols; ++i) {
    const double d = std::abs(mat[i + i * n_rows]);
    report.smallest_R_diagonal = std::min(report.smallest_R_diagonal, d);
    if (d < 1e-14 * max_diag && !report.rank_warning) {
      report.rank_warning = true;
      report.rank_warning_index = i;
    }
  }

  const auto t_solve = clock_type::now();
  // z = R^{-T} b, then u = S^{-1/2} Q [z; 0].
  std::vector<double> z(b);
  info = LAPACKE_dtrtrs(LAPACK_COL_MAJOR, 'U', 'T', 'N', n_l, 1, mat.data(), m_l,
                        z.data(), n_l);
  if (info != 0)
    fail(errc::breakdown, "triangular solve failed with info " + std::to_string(info));
  std::vector<double> y(n_rows, 0.0);
  std::copy(z.begin(), z.end(), y.begin());
  info = LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'N', m_l, 1, n_l, mat.data(), m_l,
                        tau.data(), y.data(), m_l);
  if (info != 0) fail(errc::breakdown, "dormqr failed with info " + std::to_string(info));

  report.u = smooth_half(Field(grid, std::move(y)));

  if (sys.boundary_kind() == BoundaryKind::neumann && sys.n_boundary() > 0) {
    // fix the additive constant: subtract the interpolant value at the origin
    const auto at_origin = evaluate_offgrid(report.u, std::vector<Point>{Point{0, 0, 0}});
    for (double& v : report.u.values) v -= at_origin[0];
  }
  report.solve_seconds = seconds_since(t_solve);

  report.constraint_residual_inf = sys.constraint_residual(report.u);
  return report;
}

}  // namespace ssem
