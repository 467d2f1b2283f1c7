#include "ssem/geometry.hpp"

#include <cmath>
#include <numbers>

namespace ssem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deriv_norm(const DomainSpec& domain, double th) {
  if (domain.boundary_deriv) {
    const auto d = domain.boundary_deriv(th);
    return std::hypot(d[0], d[1]);
  }
  // central difference fallback for user domains without a derivative
  const double h = 1e-6;
  const auto a = domain.boundary(th - h);
  const auto b = domain.boundary(th + h);
  return std::hypot(b[0] - a[0], b[1] - a[1]) / (2.0 * h);
}

// Cumulative arc length of the boundary parametrization over [0, 2*pi],
// trapezoid rule on n_samples+1 equispaced parameter values.
std::vector<double> cumulative_arc(const DomainSpec& domain, std::int64_t n_samples) {
  std::vector<double> cum(n_samples + 1);
  cum[0] = 0.0;
  const double dth = kTwoPi / n_samples;
  double prev = deriv_norm(domain, 0.0);
  for (std::int64_t i = 1; i <= n_samples; ++i) {
    const double cur = deriv_norm(domain, i * dth);
    cum[i] = cum[i - 1] + 0.5 * dth * (prev + cur);
    prev = cur;
  }
  return cum;
}

Point normal_from_deriv(const DomainSpec& domain, double th) {
  std::array<double, 2> d;
  if (domain.boundary_deriv) {
    d = domain.boundary_deriv(th);
  } else {
    const double h = 1e-6;
    const auto a = domain.boundary(th - h);
    const auto b = domain.boundary(th + h);
    d = {(b[0] - a[0]) / (2.0 * h), (b[1] - a[1]) / (2.0 * h)};
  }
  // outward normal of a counterclockwise arc
  const double len = std::hypot(d[0], d[1]);
  return Point{d[1] / len, -d[0] / len, 0.0};
}

}  // namespace

InteriorIndexSet classify_interior(const Grid& grid, const DomainSpec& domain) {
  if (grid.dim() != domain.dim)
    fail(errc::dimension_mismatch, "grid/domain dimension mismatch");
  InteriorIndexSet set;
  for (std::int64_t i = 0; i < grid.size(); ++i)
    if (domain.inside(grid.node_point(i))) set.indices.push_back(i);
  if (set.indices.empty())
    fail(errc::degenerate_domain,
         "domain '" + domain.name + "' contains no grid node at m = " +
             std::to_string(grid.m()));
  return set;
}

BoundaryDiscretization discretize_boundary_2d(const DomainSpec& domain, int m,
                                              double density_factor) {
  if (domain.dim != 2 || !domain.boundary)
    fail(errc::invalid_argument, "domain has no 2D boundary parametrization");

  // First pass estimates the total length to fix the point count, the
  // second samples densely enough to invert the arc length accurately.
  const double length_estimate = cumulative_arc(domain, 100000).back();
  const double rho = density_factor * m / kTwoPi;
  // the 1e-9 absorbs quadrature noise when rho*L is an exact integer
  const std::int64_t n_points =
      static_cast<std::int64_t>(std::floor(rho * length_estimate + 1e-9)) + 1;
  if (n_points < 3)
    fail(errc::too_coarse, "fewer than 3 boundary points; raise m or density");

  const std::int64_t n_samples = 10000 * n_points;
  const auto cum = cumulative_arc(domain, n_samples);
  const double total = cum.back();
  const double dth = kTwoPi / n_samples;

  BoundaryDiscretization bd;
  bd.points.reserve(n_points);
  bd.normals.reserve(n_points);
  std::int64_t lo = 0;
  for (std::int64_t j = 0; j < n_points; ++j) {
    const double target = total * static_cast<double>(j) / n_points;
    while (lo + 1 < static_cast<std::int64_t>(cum.size()) && cum[lo + 1] < target) ++lo;
    // linear inversion of the monotone cumulative table
    const double seg = cum[lo + 1] - cum[lo];
    const double frac = seg > 0.0 ? (target - cum[lo]) / seg : 0.0;
    const double th = (lo + frac) * dth;
    const auto xy = domain.boundary(th);
    bd.points.push_back(Point{xy[0], xy[1], 0.0});
    bd.normals.push_back(normal_from_deriv(domain, th));
  }
  return bd;
}

BoundaryDiscretization discretize_boundary_sphere(int m, double density_factor) {
  const double per_area = density_factor * (m / kTwoPi) * (m / kTwoPi);
  const std::int64_t n = std::llround(per_area * 4.0 * std::numbers::pi);
  if (n < 4)
    fail(errc::too_coarse, "fewer than 4 boundary points on the sphere");

  // Fibonacci lattice with the half-step offset, which keeps points off the
  // poles and the minimum pairwise separation near the optimal scale.
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  BoundaryDiscretization bd;
  bd.points.reserve(n);
  bd.normals.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    Point p{rho * std::cos(phi), rho * std::sin(phi), z};
    const double len = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    p = {p[0] / len, p[1] / len, p[2] / len};
    bd.points.push_back(p);
    bd.normals.push_back(p);
  }
  return bd;
}

BoundaryDiscretization discretize_boundary(const DomainSpec& domain, int m,
                                           double density_factor) {
  if (domain.dim == 2) return discretize_boundary_2d(domain, m, density_factor);
  if (domain.name == "sphere") return discretize_boundary_sphere(m, density_factor);
  fail(errc::unsupported_dimension,
       "no boundary discretization for 3D domain '" + domain.name + "'");
}

}  // namespace ssem
