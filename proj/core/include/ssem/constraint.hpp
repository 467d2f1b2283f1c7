#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ssem/geometry.hpp"
#include "ssem/grid.hpp"
#include "ssem/spectral.hpp"

namespace ssem {

/// One term of a second-order interior operator: coefficient times a
/// partial derivative. A null `coeff` means the constant `factor`.
struct OperatorTerm {
  std::array<int, 3> orders{0, 0, 0};
  double factor = 1.0;
  std::function<double(Point)> coeff;
};

/// Sum of coefficient-times-derivative terms, total order <= 2 each.
/// Ellipticity is the caller's responsibility.
struct InteriorOperatorSpec {
  std::vector<OperatorTerm> terms;

  static InteriorOperatorSpec negative_laplacian(int dim);
  /// Pure restriction to interior nodes (a single zeroth-order term).
  static InteriorOperatorSpec restriction();
};

enum class BoundaryKind { dirichlet, neumann };

/// The stacked constraint operator C = [A; B] for one problem instance:
/// interior operator rows at the grid nodes inside Omega, boundary operator
/// rows at the off-grid boundary points, plus the right-hand side
/// b = (f at interior nodes, g at boundary points).
///
/// Applies are pure; the system is immutable after construction.
class ConstraintSystem {
public:
  /// Builds a PDE system. `density_factor` follows the conventions of
  /// geometry.hpp; pass std::nullopt for the solver-appropriate default
  /// chosen by the caller.
  static ConstraintSystem build(const Grid& grid, const DomainSpec& domain,
                                InteriorOperatorSpec op, BoundaryKind bc,
                                double density_factor,
                                const std::function<double(Point)>& f,
                                const std::function<double(Point)>& g);

  /// Builds the extension system: C is restriction to the interior nodes
  /// and b the prescribed interior values. No boundary rows.
  static ConstraintSystem build_restriction(const Grid& grid, const DomainSpec& domain,
                                            std::vector<double> interior_values);

  const Grid& grid() const noexcept { return grid_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  const InteriorIndexSet& interior() const noexcept { return interior_; }
  const BoundaryDiscretization& boundary() const noexcept { return boundary_; }
  const InteriorOperatorSpec& interior_op() const noexcept { return op_; }
  BoundaryKind boundary_kind() const noexcept { return bc_; }

  std::int64_t n_interior() const noexcept { return interior_.count(); }
  std::int64_t n_boundary() const noexcept { return boundary_.count(); }
  std::int64_t n_lambda() const noexcept { return n_interior() + n_boundary(); }

  const std::vector<double>& rhs() const noexcept { return rhs_; }

  /// Interior rows: per term, spectral derivative on the box, restriction
  /// to the interior nodes, then multiplication by the coefficient there.
  std::vector<double> apply_A(const Field& u) const;

  /// Boundary rows: trace (Dirichlet) or outward normal derivative
  /// (Neumann), both through the off-grid interpolant.
  std::vector<double> apply_B(const Field& u) const;

  /// Stacked (interior, boundary) application.
  std::vector<double> apply_C(const Field& u) const;

  /// Exact transpose of apply_C: coefficients applied before extension by
  /// zero, adjoint derivatives, adjoint interpolation.
  Field apply_C_transpose(std::span<const double> lambda) const;

  /// Residual max_i |(C u - b)_i| / (1 + max_i |b_i|).
  double constraint_residual(const Field& u) const;

private:
  ConstraintSystem(Grid grid, DomainSpec domain) : grid_(grid), domain_(std::move(domain)) {}

  Grid grid_;
  DomainSpec domain_;
  InteriorIndexSet interior_;
  BoundaryDiscretization boundary_;
  InteriorOperatorSpec op_;
  BoundaryKind bc_ = BoundaryKind::dirichlet;
  std::vector<double> rhs_;
  // coefficient of each term sampled at the interior nodes
  std::vector<std::vector<double>> term_values_;

  friend std::vector<double> assemble_rhs(const ConstraintSystem&,
                                          const std::function<double(Point)>&,
                                          const std::function<double(Point)>&);
};

/// Samples f at interior nodes and g at boundary points, concatenated in
/// the fixed (interior, boundary) order. Throws on non-finite samples.
std::vector<double> assemble_rhs(const ConstraintSystem& sys,
                                 const std::function<double(Point)>& f,
                                 const std::function<double(Point)>& g);

/// Materializes a linear map column by column: column i is op(e_i).
/// Guarded by an element-count cap; oversize requests are pushed to the
/// matrix-free path.
Eigen::MatrixXd assemble_explicit(
    const std::function<std::vector<double>(std::span<const double>)>& op,
    std::int64_t n_rows, std::int64_t n_cols,
    std::int64_t element_cap = 450'000'000);

}  // namespace ssem
