#pragma once

#include <cstdint>
#include <vector>

#include "ssem/domain.hpp"
#include "ssem/grid.hpp"

namespace ssem {

/// Grid nodes strictly inside Omega, as sorted flat indices.
struct InteriorIndexSet {
  std::vector<std::int64_t> indices;

  std::int64_t count() const noexcept {
    return static_cast<std::int64_t>(indices.size());
  }
};

/// Off-grid boundary point set with unit outward normals.
struct BoundaryDiscretization {
  std::vector<Point> points;
  std::vector<Point> normals;

  std::int64_t count() const noexcept {
    return static_cast<std::int64_t>(points.size());
  }
};

/// Default boundary point densities. 2D values are points per unit arc
/// length divided by m/(2*pi); 3D values are points per unit area divided
/// by (m/(2*pi))^2. The explicit-matrix path tolerates tight spacing, the
/// iterative path needs boundary points the box grid can tell apart.
inline constexpr double kQrDensityFactor2d = 0.5;
inline constexpr double kPcgDensityFactor2d = 0.25;
inline constexpr double kQrDensityFactor3d = 2.0;
inline constexpr double kPcgDensityFactor3d = 1.0 / 16.0;

/// Collects the grid nodes strictly inside the domain, ordered by flat
/// index. Throws degenerate_domain when no node qualifies.
InteriorIndexSet classify_interior(const Grid& grid, const DomainSpec& domain);

/// Places floor(density_factor * (m/2pi) * L) + 1 points equally spaced in
/// arc length along the 2D boundary, L being the total arc length. Normals
/// come from the parametrization derivative.
BoundaryDiscretization discretize_boundary_2d(const DomainSpec& domain, int m,
                                              double density_factor);

/// Fibonacci-lattice points on the unit sphere: N = round(density_per_area
/// * (m/2pi)^2 * 4pi) points, radial normals.
BoundaryDiscretization discretize_boundary_sphere(int m, double density_factor);

/// Boundary discretization for any catalog domain with the given density
/// factor (interpreted per the domain dimension as above).
BoundaryDiscretization discretize_boundary(const DomainSpec& domain, int m,
                                           double density_factor);

}  // namespace ssem
