#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "ssem/errors.hpp"

namespace ssem {

/// Point in the periodic box; only the first `dim` components are used.
using Point = std::array<double, 3>;

/// Uniform periodic grid on the box (-pi,pi)^d with m nodes per axis.
///
/// Node j along each axis sits at -pi + j*(2*pi/m) for 0 <= j < m, so the
/// nodes tile [-pi, pi) exactly. Values attached to the grid are stored
/// row-major with the LAST axis contiguous: the flat index of (i0,...,i_{d-1})
/// is ((i0*m + i1)*m + i2) in 3D, i0*m + i1 in 2D. Axis 0 is x, axis 1 is y,
/// axis 2 is z.
class Grid {
public:
  Grid(int dim, int m) : dim_(dim), m_(m) {
    if (dim < 1 || dim > 3)
      fail(errc::unsupported_dimension, "grid dimension must be 1, 2, or 3");
    if (m < 2 || m % 2 != 0)
      fail(errc::invalid_argument, "grid resolution m must be even and >= 2");
  }

  int dim() const noexcept { return dim_; }
  int m() const noexcept { return m_; }

  /// Total node count N = m^d.
  std::int64_t size() const noexcept {
    std::int64_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= m_;
    return n;
  }

  double spacing() const noexcept { return 2.0 * std::numbers::pi / m_; }

  double node_coord(int j) const noexcept {
    return -std::numbers::pi + j * spacing();
  }

  /// Multi-index of a flat index, in the documented axis order.
  std::array<int, 3> unflatten(std::int64_t flat) const noexcept {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % m_);
      flat /= m_;
    }
    return idx;
  }

  std::int64_t flatten(const std::array<int, 3>& idx) const noexcept {
    std::int64_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * m_ + idx[a];
    return flat;
  }

  Point node_point(std::int64_t flat) const noexcept {
    const auto idx = unflatten(flat);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) p[a] = node_coord(idx[a]);
    return p;
  }

  bool operator==(const Grid& other) const noexcept {
    return dim_ == other.dim_ && m_ == other.m_;
  }

private:
  int dim_;
  int m_;
};

/// Signed integer frequency for an FFT bin: k in {-m/2, ..., m/2 - 1}.
/// Bin b maps to k = b for b < m/2 and k = b - m otherwise, the native
/// ordering of the discrete transform.
inline int signed_frequency(int bin, int m) noexcept {
  return bin < m / 2 ? bin : bin - m;
}

/// Real values on a Grid, in the grid's flat ordering.
struct Field {
  Grid grid;
  std::vector<double> values;

  explicit Field(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != grid.size())
      fail(errc::dimension_mismatch, "field length does not match grid");
  }
};

/// Samples a function at every grid node.
inline Field sample(const Grid& grid, const std::function<double(Point)>& fn) {
  Field f(grid);
  for (std::int64_t i = 0; i < grid.size(); ++i) f.values[i] = fn(grid.node_point(i));
  return f;
}

inline double inf_norm(const std::vector<double>& v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  return mx;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(errc::dimension_mismatch, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace ssem
