#include "ssem/constraint.hpp"

#include <cmath>

namespace ssem {

InteriorOperatorSpec InteriorOperatorSpec::negative_laplacian(int dim) {
  InteriorOperatorSpec spec;
  for (int a = 0; a < dim; ++a) {
    OperatorTerm t;
    t.orders[a] = 2;
    t.factor = -1.0;
    spec.terms.push_back(std::move(t));
  }
  return spec;
}

InteriorOperatorSpec InteriorOperatorSpec::restriction() {
  InteriorOperatorSpec spec;
  spec.terms.push_back(OperatorTerm{});
  return spec;
}

namespace {

int total_order(const OperatorTerm& t) {
  return t.orders[0] + t.orders[1] + t.orders[2];
}

void validate_op(const InteriorOperatorSpec& op) {
  if (op.terms.empty())
    fail(errc::invalid_argument, "interior operator has no terms");
  for (const auto& t : op.terms)
    if (total_order(t) > 2)
      fail(errc::unsupported_order, "interior operator term above order 2");
}

std::vector<std::vector<double>> sample_coefficients(
    const InteriorOperatorSpec& op, const Grid& grid, const InteriorIndexSet& interior) {
  std::vector<std::vector<double>> values(op.terms.size());
  for (std::size_t t = 0; t < op.terms.size(); ++t) {
    const auto& term = op.terms[t];
    values[t].resize(interior.indices.size());
    for (std::size_t i = 0; i < interior.indices.size(); ++i) {
      const Point p = grid.node_point(interior.indices[i]);
      values[t][i] = term.coeff ? term.coeff(p) : term.factor;
      if (!std::isfinite(values[t][i]))
        fail(errc::invalid_data, "non-finite operator coefficient sample");
    }
  }
  return values;
}

}  // namespace

ConstraintSystem ConstraintSystem::build(const Grid& grid, const DomainSpec& domain,
                                         InteriorOperatorSpec op, BoundaryKind bc,
                                         double density_factor,
                                         const std::function<double(Point)>& f,
                                         const std::function<double(Point)>& g) {
  validate_op(op);
  ConstraintSystem sys(grid, domain);
  sys.interior_ = classify_interior(grid, domain);
  sys.boundary_ = discretize_boundary(domain, grid.m(), density_factor);
  sys.op_ = std::move(op);
  sys.bc_ = bc;
  sys.term_values_ = sample_coefficients(sys.op_, grid, sys.interior_);
  if (sys.n_lambda() >= grid.size())
    fail(errc::invalid_argument,
         "constraint count reaches the grid size; the system is no longer "
         "under-determined");
  sys.rhs_ = assemble_rhs(sys, f, g);
  return sys;
}

ConstraintSystem ConstraintSystem::build_restriction(const Grid& grid,
                                                     const DomainSpec& domain,
                                                     std::vector<double> interior_values) {
  ConstraintSystem sys(grid, domain);
  sys.interior_ = classify_interior(grid, domain);
  sys.op_ = InteriorOperatorSpec::restriction();
  sys.bc_ = BoundaryKind::dirichlet;
  sys.term_values_ = sample_coefficients(sys.op_, grid, sys.interior_);
  if (static_cast<std::int64_t>(interior_values.size()) != sys.n_interior())
    fail(errc::dimension_mismatch, "interior value count does not match domain");
  for (double v : interior_values)
    if (!std::isfinite(v)) fail(errc::invalid_data, "non-finite interior value");
  sys.rhs_ = std::move(interior_values);
  return sys;
}

std::vector<double> ConstraintSystem::apply_A(const Field& u) const {
  if (!(u.grid == grid_)) fail(errc::dimension_mismatch, "apply_A: grid mismatch");
  std::vector<double> out(interior_.indices.size(), 0.0);
  for (std::size_t t = 0; t < op_.terms.size(); ++t) {
    const Field du = partial_derivative(u, op_.terms[t].orders);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += term_values_[t][i] * du.values[interior_.indices[i]];
  }
  return out;
}

std::vector<double> ConstraintSystem::apply_B(const Field& u) const {
  if (!(u.grid == grid_)) fail(errc::dimension_mismatch, "apply_B: grid mismatch");
  if (boundary_.points.empty()) return {};
  if (bc_ == BoundaryKind::dirichlet) return evaluate_offgrid(u, boundary_.points);

  std::vector<double> out(boundary_.points.size(), 0.0);
  for (int a = 0; a < grid_.dim(); ++a) {
    std::array<int, 3> orders{0, 0, 0};
    orders[a] = 1;
    const Field du = partial_derivative(u, orders);
    const auto vals = evaluate_offgrid(du, boundary_.points);
    for (std::size_t q = 0; q < out.size(); ++q)
      out[q] += boundary_.normals[q][a] * vals[q];
  }
  return out;
}

std::vector<double> ConstraintSystem::apply_C(const Field& u) const {
  std::vector<double> out = apply_A(u);
  const auto b = apply_B(u);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Field ConstraintSystem::apply_C_transpose(std::span<const double> lambda) const {
  if (static_cast<std::int64_t>(lambda.size()) != n_lambda())
    fail(errc::dimension_mismatch, "apply_C_transpose: multiplier length mismatch");
  const auto lambda_a = lambda.first(interior_.indices.size());
  const auto lambda_b = lambda.subspan(interior_.indices.size());

  Field out(grid_);
  // A part: coefficients first, then extension by zero, then the adjoint
  // derivative (-1)^{|alpha|} D^{alpha}. This mirrors apply_A exactly.
  for (std::size_t t = 0; t < op_.terms.size(); ++t) {
    Field z(grid_);
    for (std::size_t i = 0; i < lambda_a.size(); ++i)
      z.values[interior_.indices[i]] = term_values_[t][i] * lambda_a[i];
    const double sign = total_order(op_.terms[t]) % 2 == 0 ? 1.0 : -1.0;
    const Field dz = partial_derivative(z, op_.terms[t].orders);
    for (std::int64_t j = 0; j < grid_.size(); ++j) out.values[j] += sign * dz.values[j];
  }

  if (!boundary_.points.empty()) {
    if (bc_ == BoundaryKind::dirichlet) {
      const Field e = evaluate_offgrid_adjoint(grid_, lambda_b, boundary_.points);
      for (std::int64_t j = 0; j < grid_.size(); ++j) out.values[j] += e.values[j];
    } else {
      for (int a = 0; a < grid_.dim(); ++a) {
        std::vector<double> w(lambda_b.size());
        for (std::size_t q = 0; q < w.size(); ++q)
          w[q] = boundary_.normals[q][a] * lambda_b[q];
        const Field e = evaluate_offgrid_adjoint(grid_, w, boundary_.points);
        std::array<int, 3> orders{0, 0, 0};
        orders[a] = 1;
        const Field de = partial_derivative(e, orders);
        for (std::int64_t j = 0; j < grid_.size(); ++j) out.values[j] -= de.values[j];
      }
    }
  }
  return out;
}

double ConstraintSystem::constraint_residual(const Field& u) const {
  const auto cu = apply_C(u);
  double num = 0.0;
  for (std::size_t i = 0; i < cu.size(); ++i)
    num = std::max(num, std::abs(cu[i] - rhs_[i]));
  return num / (1.0 + inf_norm(rhs_));
}

std::vector<double> assemble_rhs(const ConstraintSystem& sys,
                                 const std::function<double(Point)>& f,
                                 const std::function<double(Point)>& g) {
  std::vector<double> b;
  b.reserve(sys.n_lambda());
  for (std::int64_t idx : sys.interior_.indices) {
    const double v = f(sys.grid_.node_point(idx));
    if (!std::isfinite(v)) fail(errc::invalid_data, "non-finite interior sample");
    b.push_back(v);
  }
  for (const Point& p : sys.boundary_.points) {
    const double v = g(p);
    if (!std::isfinite(v)) fail(errc::invalid_data, "non-finite boundary sample");
    b.push_back(v);
  }
  return b;
}

Eigen::MatrixXd assemble_explicit(
    const std::function<std::vector<double>(std::span<const double>)>& op,
    std::int64_t n_rows, std::int64_t n_cols, std::int64_t element_cap) {
  if (n_rows <= 0 || n_cols <= 0)
    fail(errc::invalid_argument, "assemble_explicit: empty shape");
  if (n_rows * n_cols > element_cap)
    fail(errc::too_large_for_dense,
         "explicit matrix would exceed the dense cap; use the iterative path");
  Eigen::MatrixXd mat(n_rows, n_cols);
  std::vector<double> e(n_cols, 0.0);
  for (std::int64_t i = 0; i < n_cols; ++i) {
    e[i] = 1.0;
    const auto col = op(e);
    if (static_cast<std::int64_t>(col.size()) != n_rows)
      fail(errc::dimension_mismatch, "assemble_explicit: wrong column length");
    for (std::int64_t r = 0; r < n_rows; ++r) mat(r, i) = col[r];
    e[i] = 0.0;
  }
  return mat;
}

}  // namespace ssem
