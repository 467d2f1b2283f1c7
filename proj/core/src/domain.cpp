#include "ssem/domain.hpp"

#include <cmath>

namespace ssem::domains {

DomainSpec disc(double radius) {
  DomainSpec d;
  d.name = "disc";
  d.dim = 2;
  const double r = radius;
  d.inside = [r](Point p) { return p[0] * p[0] + p[1] * p[1] < r * r; };
  d.boundary = [r](double th) {
    return std::array<double, 2>{r * std::cos(th), r * std::sin(th)};
  };
  d.boundary_deriv = [r](double th) {
    return std::array<double, 2>{-r * std::sin(th), r * std::cos(th)};
  };
  d.normal = [](Point p) {
    const double len = std::hypot(p[0], p[1]);
    return Point{p[0] / len, p[1] / len, 0.0};
  };
  return d;
}

DomainSpec flower() {
  DomainSpec d;
  d.name = "flower";
  d.dim = 2;
  auto radius_at = [](double th) { return 1.0 + 0.2 * std::cos(5.0 * th); };
  d.inside = [radius_at](Point p) {
    const double r = std::hypot(p[0], p[1]);
    const double th = std::atan2(p[1], p[0]);
    return r < radius_at(th);
  };
  d.boundary = [radius_at](double th) {
    const double r = radius_at(th);
    return std::array<double, 2>{r * std::cos(th), r * std::sin(th)};
  };
  d.boundary_deriv = [radius_at](double th) {
    const double r = radius_at(th);
    const double dr = -std::sin(5.0 * th);  // d/dth of 1 + 0.2 cos(5 th)
    return std::array<double, 2>{dr * std::cos(th) - r * std::sin(th),
                                 dr * std::sin(th) + r * std::cos(th)};
  };
  d.normal = [radius_at](Point p) {
    // grad of r - (1 + 0.2 cos(5 theta)) in Cartesian coordinates
    const double r = std::hypot(p[0], p[1]);
    const double th = std::atan2(p[1], p[0]);
    const double dr = -std::sin(5.0 * th);
    const double cx = std::cos(th), sx = std::sin(th);
    const double gx = cx + dr * sx / r;
    const double gy = sx - dr * cx / r;
    const double len = std::hypot(gx, gy);
    return Point{gx / len, gy / len, 0.0};
  };
  return d;
}

DomainSpec sphere() {
  DomainSpec d;
  d.name = "sphere";
  d.dim = 3;
  d.inside = [](Point p) {
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < 1.0;
  };
  d.normal = [](Point p) {
    const double len = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    return Point{p[0] / len, p[1] / len, p[2] / len};
  };
  return d;
}

DomainSpec level_set_2d(std::string name, std::function<bool(Point)> inside,
                        std::function<std::array<double, 2>(double)> boundary,
                        std::function<std::array<double, 2>(double)> boundary_deriv,
                        std::function<Point(Point)> normal) {
  DomainSpec d;
  d.name = std::move(name);
  d.dim = 2;
  d.inside = std::move(inside);
  d.boundary = std::move(boundary);
  d.boundary_deriv = std::move(boundary_deriv);
  d.normal = std::move(normal);
  return d;
}

DomainSpec by_name(const std::string& name) {
  if (name == "disc") return disc();
  if (name == "flower") return flower();
  if (name == "sphere") return sphere();
  fail(errc::invalid_argument, "unknown domain '" + name + "'");
}

}  // namespace ssem::domains
