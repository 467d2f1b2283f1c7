#pragma once

#include <functional>
#include <string>

#include "ssem/grid.hpp"

namespace ssem {

/// Implicitly defined domain Omega with its boundary description. The
/// closure of Omega must lie strictly inside the periodic box (-pi,pi)^d.
///
/// In 2D the boundary is a closed arc parametrized by theta in [0, 2*pi);
/// `boundary` and `boundary_deriv` return position and derivative of that
/// parametrization. In 3D only the unit sphere is built in; generic 3D
/// level sets would need their own surface sampling.
struct DomainSpec {
  std::string name;
  int dim = 2;
  std::function<bool(Point)> inside;                       // strictly inside
  std::function<std::array<double, 2>(double)> boundary;   // 2D only
  std::function<std::array<double, 2>(double)> boundary_deriv;
  std::function<Point(Point)> normal;                      // unit outward normal
};

namespace domains {

/// Disc of given radius centered at the origin.
DomainSpec disc(double radius = 1.0);

/// Five-petaled flower r < 1 + 0.2 cos(5 theta).
DomainSpec flower();

/// Unit ball in 3D.
DomainSpec sphere();

/// Hook for user-supplied 2D domains given by an inside predicate and a
/// boundary arc parametrization (derivative optional; differenced if null).
DomainSpec level_set_2d(std::string name, std::function<bool(Point)> inside,
                        std::function<std::array<double, 2>(double)> boundary,
                        std::function<std::array<double, 2>(double)> boundary_deriv,
                        std::function<Point(Point)> normal);

/// Looks up a catalog domain by name ("disc", "flower", "sphere").
DomainSpec by_name(const std::string& name);

}  // namespace domains

}  // namespace ssem
