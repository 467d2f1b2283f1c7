#include "ssem/pcg_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace ssem {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

Point wrapped_difference(const Point& a, const Point& b, int dim) {
  const double two_pi = 2.0 * std::numbers::pi;
  Point d{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    double v = a[i] - b[i];
    v -= two_pi * std::round(v / two_pi);
    d[i] = v;
  }
  return d;
}

/// (1 - Delta_Omega) with the compact 5/7-point stencil restricted to
/// interior nodes. Off-domain neighbors contribute nothing; the diagonal
/// keeps the full 2d/s^2 scaling, which keeps the operator SPD.
class InteriorStencil {
public:
  InteriorStencil(const Grid& grid, const InteriorIndexSet& interior)
      : inv_s2_(1.0 / (grid.spacing() * grid.spacing())), dim_(grid.dim()) {
    const std::int64_t n = interior.count();
    std::unordered_map<std::int64_t, std::int64_t> position;
    position.reserve(n * 2);
    for (std::int64_t i = 0; i < n; ++i) position.emplace(interior.indices[i], i);

    neighbors_.assign(static_cast<std::size_t>(n) * 2 * dim_, -1);
    const int m = grid.m();
    for (std::int64_t i = 0; i < n; ++i) {
      const auto idx = grid.unflatten(interior.indices[i]);
      int slot = 0;
      for (int a = 0; a < dim_; ++a) {
        for (int step : {-1, +1}) {
          auto nb = idx;
          nb[a] = (idx[a] + step + m) % m;
          const auto it = position.find(grid.flatten(nb));
          neighbors_[i * 2 * dim_ + slot] = it == position.end() ? -1 : it->second;
          ++slot;
        }
      }
    }
  }

  std::vector<double> apply(std::span<const double> v) const {
    const std::int64_t n = static_cast<std::int64_t>(v.size());
    std::vector<double> out(n);
    for (std::int64_t i = 0; i < n; ++i) {
      double nb_sum = 0.0;
      for (int s = 0; s < 2 * dim_; ++s) {
        const std::int64_t j = neighbors_[i * 2 * dim_ + s];
        if (j >= 0) nb_sum += v[j];
      }
      out[i] = v[i] + (2.0 * dim_ * v[i] - nb_sum) * inv_s2_;
    }
    return out;
  }

private:
  double inv_s2_;
  int dim_;
  std::vector<std::int64_t> neighbors_;
};

int interior_operator_order(const InteriorOperatorSpec& op) {
  int order = 0;
  for (const auto& t : op.terms)
    order = std::max(order, t.orders[0] + t.orders[1] + t.orders[2]);
  return order;
}

// Chord-length quadrature weights for the boundary point set; used only to
// build the near-null deflation direction for stagnating Neumann solves.
double boundary_weight(const BoundaryDiscretization& bd, int dim) {
  if (dim == 3) return 4.0 * std::numbers::pi / bd.count();
  double length = 0.0;
  for (std::int64_t q = 0; q < bd.count(); ++q) {
    const auto& a = bd.points[q];
    const auto& b = bd.points[(q + 1) % bd.count()];
    length += std::hypot(a[0] - b[0], a[1] - b[1]);
  }
  return length / bd.count();
}

}  // namespace

Eigen::MatrixXd boundary_preconditioner_matrix(const KernelTable& table,
                                               const BoundaryDiscretization& boundary,
                                               int m) {
  const std::int64_t n = boundary.count();
  const double cell = std::pow(2.0 * std::numbers::pi / m, table.dim);
  Eigen::MatrixXd mat(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      mat(i, j) = cell * table.value_at(
                             wrapped_difference(boundary.points[i], boundary.points[j],
                                                table.dim));
  return mat;
}

Eigen::MatrixXd assemble_boundary_preconditioner(const KernelTable& table,
                                                 const BoundaryDiscretization& boundary,
                                                 int m) {
  const Eigen::MatrixXd mat = boundary_preconditioner_matrix(table, boundary, m);
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() != Eigen::Success)
    fail(errc::preconditioner_failure,
         "boundary kernel matrix is not numerically SPD; lower the boundary "
         "point density");
  return llt.solve(Eigen::MatrixXd::Identity(mat.rows(), mat.cols()));
}

std::vector<double> apply_interior_preconditioner(std::span<const double> lambda_a,
                                                  int p, const Grid& grid,
                                                  const InteriorIndexSet& interior) {
  if (p < 2 || p > 4)
    fail(errc::unsupported_order, "interior preconditioner supports p in {2,3,4}");
  std::vector<double> out(lambda_a.begin(), lambda_a.end());
  if (p == 2) return out;
  const InteriorStencil stencil(grid, interior);
  for (int i = 0; i < p - 2; ++i) out = stencil.apply(out);
  return out;
}

PcgReport pcg_solve(const ConstraintSystem& sys, int p, const PcgOptions& options) {
  if (p < 2 || p > 4)
    fail(errc::unsupported_order, "PCG path supports p in {2,3,4}");
  const Grid& grid = sys.grid();
  const std::int64_t n_int = sys.n_interior();
  const std::int64_t n_bdy = sys.n_boundary();
  const std::int64_t n = n_int + n_bdy;

  PcgReport report{Field(grid)};
  std::vector<double> b = sys.rhs();
  if (std::all_of(b.begin(), b.end(), [](double x) { return x == 0.0; })) return report;

  const bool neumann = sys.boundary_kind() == BoundaryKind::neumann && n_bdy > 0;

  const auto t_build = clock_type::now();
  Eigen::MatrixXd c3_inverse;
  if (n_bdy > 0) {
    const int p_eff = neumann ? p - 1 : p;
    const KernelTable table =
        load_or_build_kernel_table(p_eff, grid.dim(), options.kernel_cache_dir);
    c3_inverse = assemble_boundary_preconditioner(table, sys.boundary(), grid.m());
  }
  // Stencil power chosen so the preconditioned interior block has order
  // zero: p-2 for second-order interior operators, p for the pure
  // restriction used by extension problems.
  const int power = p - interior_operator_order(sys.interior_op());
  const InteriorStencil stencil(grid, sys.interior());

  auto precondition = [&](const std::vector<double>& r) {
    std::vector<double> z(r.begin(), r.begin() + n_int);
    for (int i = 0; i < power; ++i) z = stencil.apply(z);
    z.resize(n);
    if (n_bdy > 0) {
      Eigen::Map<const Eigen::VectorXd> rb(r.data() + n_int, n_bdy);
      Eigen::VectorXd zb = c3_inverse * rb;
      for (std::int64_t q = 0; q < n_bdy; ++q) z[n_int + q] = zb(q);
    }
    return z;
  };
  report.precond_build_seconds = seconds_since(t_build);

  auto apply_normal = [&](const std::vector<double>& lambda) {
    const Field v = smoother_apply(sys.apply_C_transpose(lambda), p, SmootherPower::inverse);
    return sys.apply_C(v);
  };

  const auto t_iter = clock_type::now();
  std::vector<double> lambda(n, 0.0);
  std::vector<double> r = b;
  std::vector<double> z = precondition(r);
  double rho = dot(r, z);
  const double rho0 = rho;
  if (!(rho0 > 0.0) || !std::isfinite(rho0))
    fail(errc::breakdown, "preconditioned residual is not positive at start");
  std::vector<double> direction = z;

  std::vector<double> alphas, betas;
  report.residual_history.push_back(1.0);
  bool converged = false;
  bool deflated = false;
  double best_rel = 1.0;
  int best_iter = 0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const std::vector<double> q = apply_normal(direction);
    const double dq = dot(direction, q);
    if (!std::isfinite(dq) || dq <= 0.0)
      fail(errc::breakdown, "conjugate gradient breakdown: direction'Kd = " +
                                std::to_string(dq));
    const double alpha = rho / dq;
    alphas.push_back(alpha);
    for (std::int64_t i = 0; i < n; ++i) {
      lambda[i] += alpha * direction[i];
      r[i] -= alpha * q[i];
    }
    z = precondition(r);
    const double rho_new = dot(r, z);
    if (!std::isfinite(rho_new))
      fail(errc::breakdown, "non-finite iterate in conjugate gradients");
    const double rel = std::sqrt(std::max(rho_new, 0.0) / rho0);
    report.residual_history.push_back(rel);
    report.iterations = iter;
    report.final_relative_residual = rel;
    if (rel <= options.tol) {
      converged = true;
      break;
    }
    if (rel < 0.9 * best_rel) {
      best_rel = rel;
      best_iter = iter;
    }
    // A stagnating pure-Neumann solve gets one shot at deflating the
    // near-null direction from the data, then restarts.
    if (neumann && !deflated && iter - best_iter >= 30) {
      deflated = true;
      std::vector<double> w(n, 0.0);
      const double cell = std::pow(grid.spacing(), grid.dim());
      for (std::int64_t i = 0; i < n_int; ++i) w[i] = cell;
      const double bw = boundary_weight(sys.boundary(), grid.dim());
      for (std::int64_t qi = 0; qi < n_bdy; ++qi) w[n_int + qi] = bw;
      const double proj = dot(w, b) / dot(w, w);
      for (std::int64_t i = 0; i < n; ++i) b[i] -= proj * w[i];
      std::fill(lambda.begin(), lambda.end(), 0.0);
      r = b;
      z = precondition(r);
      rho = dot(r, z);
      direction = z;
      alphas.clear();
      betas.clear();
      continue;
    }
    const double beta = rho_new / rho;
    betas.push_back(beta);
    for (std::int64_t i = 0; i < n; ++i) direction[i] = z[i] + beta * direction[i];
    rho = rho_new;
  }
  report.iterate_seconds = seconds_since(t_iter);

  if (!converged)
    throw ConvergenceError(
        "PCG did not reach tol " + std::to_string(options.tol) + " in " +
            std::to_string(options.max_iter) + " iterations (residual " +
            std::to_string(report.final_relative_residual) + ")",
        report.residual_history);

  // Extremal Ritz values of the CG tridiagonal estimate the preconditioned
  // operator's spectrum.
  if (alphas.size() >= 2) {
    const int k = static_cast<int>(alphas.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    t(0, 0) = 1.0 / alphas[0];
    for (int i = 1; i < k; ++i) {
      t(i, i) = 1.0 / alphas[i] + betas[i - 1] / alphas[i - 1];
      const double off = std::sqrt(std::max(betas[i - 1], 0.0)) / alphas[i - 1];
      t(i, i - 1) = off;
      t(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo > 0.0) report.condition_estimate = hi / lo;
  }

  report.u = smoother_apply(sys.apply_C_transpose(lambda), p, SmootherPower::inverse);
  if (neumann) {
    const auto at_origin = evaluate_offgrid(report.u, std::vector<Point>{Point{0, 0, 0}});
    for (double& v : report.u.values) v -= at_origin[0];
  }
  return report;
}

}  // namespace ssem
