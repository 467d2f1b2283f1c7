#include "ssem/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace ssem {

namespace {

using cplx = std::complex<double>;

// FFTW planner access is serialized; execution through the array-execute
// API is safe from multiple threads. Plans are created once per (dim, m,
// direction) with FFTW_UNALIGNED so they run on any caller buffer.
fftw_plan plan_for(int dim, int m, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::scoped_lock lock(mu);
  const auto key = std::make_tuple(dim, m, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  std::int64_t n = 1;
  for (int a = 0; a < dim; ++a) n *= m;
  fftw_complex* in = fftw_alloc_complex(n);
  fftw_complex* out = fftw_alloc_complex(n);
  int dims[3] = {m, m, m};
  fftw_plan plan = fftw_plan_dft(dim, dims, in, out, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  plans.emplace(key, plan);
  return plan;
}

void run_fft(const Grid& g, int sign, cplx* in, cplx* out) {
  fftw_execute_dft(plan_for(g.dim(), g.m(), sign),
                   reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

std::vector<cplx> forward_transform(const Field& f) {
  std::vector<cplx> buf(f.values.begin(), f.values.end());
  std::vector<cplx> out(buf.size());
  run_fft(f.grid, FFTW_FORWARD, buf.data(), out.data());
  return out;
}

// Inverse transform with the 1/N factor; asserts the imaginary residue is
// roundoff-sized before discarding it.
Field inverse_transform_real(const Grid& g, std::vector<cplx>& spectrum) {
  std::vector<cplx> out(spectrum.size());
  run_fft(g, FFTW_BACKWARD, spectrum.data(), out.data());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  double max_abs = 0.0, max_imag = 0.0;
  for (const cplx& z : out) {
    max_abs = std::max(max_abs, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
  }
  if (max_imag > 1e-9 * max_abs)
    fail(errc::invalid_symbol,
         "multiplier produced a non-real field (imaginary residue " +
             std::to_string(max_imag * inv_n) + ")");
  Field result(g);
  for (std::size_t i = 0; i < out.size(); ++i) result.values[i] = out[i].real() * inv_n;
  return result;
}

// Visits every FFT bin in flat order together with its signed frequency
// vector. fn(flat, k) with k valid up to index dim-1.
template <typename Fn>
void for_each_bin(const Grid& g, Fn&& fn) {
  const int m = g.m();
  std::array<int, 3> k{0, 0, 0};
  std::int64_t flat = 0;
  switch (g.dim()) {
    case 1:
      for (int b0 = 0; b0 < m; ++b0) {
        k[0] = signed_frequency(b0, m);
        fn(flat++, k);
      }
      break;
    case 2:
      for (int b0 = 0; b0 < m; ++b0) {
        k[0] = signed_frequency(b0, m);
        for (int b1 = 0; b1 < m; ++b1) {
          k[1] = signed_frequency(b1, m);
          fn(flat++, k);
        }
      }
      break;
    default:
      for (int b0 = 0; b0 < m; ++b0) {
        k[0] = signed_frequency(b0, m);
        for (int b1 = 0; b1 < m; ++b1) {
          k[1] = signed_frequency(b1, m);
          for (int b2 = 0; b2 < m; ++b2) {
            k[2] = signed_frequency(b2, m);
            fn(flat++, k);
          }
        }
      }
  }
}

// Per-axis basis value of bin b at coordinate x. Non-Nyquist bins are
// exp(i k (x+pi)), which equals the DFT kernel exp(2*pi*i*k*j/m) at node j;
// the Nyquist bin is the real combination cos((m/2)(x+pi)).
cplx bin_basis(int bin, int m, double x) {
  const double t = x + std::numbers::pi;
  if (bin == m / 2) return cplx(std::cos(0.5 * m * t), 0.0);
  const double kt = signed_frequency(bin, m) * t;
  return cplx(std::cos(kt), std::sin(kt));
}

void check_point_in_box(const Point& p, int dim) {
  for (int a = 0; a < dim; ++a)
    if (!(p[a] >= -std::numbers::pi && p[a] < std::numbers::pi))
      fail(errc::out_of_domain,
           "evaluation point outside [-pi,pi)^d; wrap coordinates first");
}

// Per-axis tables of bin basis values for one point.
std::array<std::vector<cplx>, 3> basis_tables(const Grid& g, const Point& p) {
  std::array<std::vector<cplx>, 3> t;
  for (int a = 0; a < g.dim(); ++a) {
    t[a].resize(g.m());
    for (int b = 0; b < g.m(); ++b) t[a][b] = bin_basis(b, g.m(), p[a]);
  }
  return t;
}

double eval_with_tables(const Grid& g, const std::vector<cplx>& spectrum,
                        const std::array<std::vector<cplx>, 3>& t) {
  const int m = g.m();
  cplx acc(0.0, 0.0);
  std::int64_t flat = 0;
  switch (g.dim()) {
    case 1:
      for (int b0 = 0; b0 < m; ++b0) acc += spectrum[flat++] * t[0][b0];
      break;
    case 2:
      for (int b0 = 0; b0 < m; ++b0)
        for (int b1 = 0; b1 < m; ++b1) acc += spectrum[flat++] * (t[0][b0] * t[1][b1]);
      break;
    default:
      for (int b0 = 0; b0 < m; ++b0)
        for (int b1 = 0; b1 < m; ++b1) {
          const cplx t01 = t[0][b0] * t[1][b1];
          for (int b2 = 0; b2 < m; ++b2) acc += spectrum[flat++] * (t01 * t[2][b2]);
        }
  }
  return acc.real() / static_cast<double>(g.size());
}

void accumulate_with_tables(const Grid& g, double w,
                            const std::array<std::vector<cplx>, 3>& t,
                            std::vector<cplx>& accum) {
  const int m = g.m();
  std::int64_t flat = 0;
  switch (g.dim()) {
    case 1:
      for (int b0 = 0; b0 < m; ++b0) accum[flat++] += w * t[0][b0];
      break;
    case 2:
      for (int b0 = 0; b0 < m; ++b0)
        for (int b1 = 0; b1 < m; ++b1) accum[flat++] += w * (t[0][b0] * t[1][b1]);
      break;
    default:
      for (int b0 = 0; b0 < m; ++b0)
        for (int b1 = 0; b1 < m; ++b1) {
          const cplx t01 = t[0][b0] * t[1][b1];
          for (int b2 = 0; b2 < m; ++b2) accum[flat++] += w * (t01 * t[2][b2]);
        }
  }
}

// shared core of the adjoint evaluations: (1/N) Re forward-transform of the
// accumulated bin array, the exact matrix transpose of the evaluation
Field adjoint_from_bins(const Grid& grid, std::vector<cplx>& accum) {
  std::vector<cplx> out(accum.size());
  run_fft(grid, FFTW_FORWARD, accum.data(), out.data());
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  Field result(grid);
  for (std::size_t i = 0; i < out.size(); ++i) result.values[i] = out[i].real() * inv_n;
  return result;
}

}  // namespace

Field apply_symbol(const Field& f, const RealSymbol& sigma) {
  auto spectrum = forward_transform(f);
  for_each_bin(f.grid, [&](std::int64_t flat, const std::array<int, 3>& k) {
    const double s = sigma(std::span<const int>(k.data(), f.grid.dim()));
    if (!std::isfinite(s))
      fail(errc::invalid_symbol, "symbol value is not finite");
    spectrum[flat] *= s;
  });
  return inverse_transform_real(f.grid, spectrum);
}

Field partial_derivative(const Field& f, const std::array<int, 3>& orders) {
  const Grid& g = f.grid;
  int total = 0;
  for (int a = 0; a < 3; ++a) {
    if (orders[a] < 0) fail(errc::unsupported_order, "negative derivative order");
    if (a >= g.dim() && orders[a] != 0)
      fail(errc::unsupported_order, "derivative order on a missing axis");
    total += orders[a];
  }
  if (total > 2)
    fail(errc::unsupported_order, "total derivative order above 2 is unsupported");
  if (total == 0) return f;

  // Per-axis multiplier tables (ik)^order with the Nyquist mode zeroed on
  // odd-order axes.
  std::array<std::vector<cplx>, 3> mult;
  for (int a = 0; a < g.dim(); ++a) {
    mult[a].assign(g.m(), cplx(1.0, 0.0));
    if (orders[a] == 0) continue;
    for (int b = 0; b < g.m(); ++b) {
      const double k = signed_frequency(b, g.m());
      if (orders[a] % 2 == 1 && b == g.m() / 2) {
        mult[a][b] = 0.0;
      } else if (orders[a] == 1) {
        mult[a][b] = cplx(0.0, k);
      } else {
        mult[a][b] = cplx(-k * k, 0.0);
      }
    }
  }

  auto spectrum = forward_transform(f);
  const int m = g.m();
  for_each_bin(g, [&](std::int64_t flat, const std::array<int, 3>& k) {
    cplx v = spectrum[flat];
    for (int a = 0; a < g.dim(); ++a) {
      if (orders[a] == 0) continue;
      const int bin = k[a] >= 0 ? k[a] : k[a] + m;
      v *= mult[a][bin];
    }
    spectrum[flat] = v;
  });
  return inverse_transform_real(g, spectrum);
}

Field smoother_apply(const Field& f, int p, SmootherPower power) {
  if (p < 1 || p > 10)
    fail(errc::unsupported_order,
         "smoother order p must lie in [1,10] (multiplier underflows beyond)");
  const Grid& g = f.grid;
  const double expo = power == SmootherPower::inverse ? -double(p) : -0.5 * p;

  // |k|^2 is an integer bounded by d*(m/2)^2; table the multiplier once.
  const int max_k2 = g.dim() * (g.m() / 2) * (g.m() / 2);
  std::vector<double> table(max_k2 + 1);
  for (int q = 0; q <= max_k2; ++q) table[q] = std::pow(1.0 + q, expo);

  auto spectrum = forward_transform(f);
  for_each_bin(g, [&](std::int64_t flat, const std::array<int, 3>& k) {
    int k2 = 0;
    for (int a = 0; a < g.dim(); ++a) k2 += k[a] * k[a];
    spectrum[flat] *= table[k2];
  });
  return inverse_transform_real(g, spectrum);
}

std::vector<double> evaluate_offgrid(const Field& f, std::span<const Point> points) {
  const Grid& g = f.grid;
  for (const Point& p : points) check_point_in_box(p, g.dim());
  const auto spectrum = forward_transform(f);
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t q = 0; q < points.size(); ++q)
    out[q] = eval_with_tables(g, spectrum, basis_tables(g, points[q]));
  return out;
}

Field evaluate_offgrid_adjoint(const Grid& grid, std::span<const double> weights,
                               std::span<const Point> points) {
  if (weights.size() != points.size())
    fail(errc::dimension_mismatch, "offgrid adjoint: weights/points length mismatch");
  for (const Point& p : points) check_point_in_box(p, grid.dim());

  std::vector<cplx> accum(grid.size(), cplx(0.0, 0.0));
  for (std::size_t q = 0; q < points.size(); ++q) {
    if (weights[q] == 0.0) continue;
    accumulate_with_tables(grid, weights[q], basis_tables(grid, points[q]), accum);
  }
  return adjoint_from_bins(grid, accum);
}

double spectral_power(const Field& f, const RealSymbol& weight) {
  const auto spectrum = forward_transform(f);
  double sum = 0.0;
  for_each_bin(f.grid, [&](std::int64_t flat, const std::array<int, 3>& k) {
    const double w = weight(std::span<const int>(k.data(), f.grid.dim()));
    if (!std::isfinite(w)) fail(errc::invalid_symbol, "weight value is not finite");
    sum += w * std::norm(spectrum[flat]);
  });
  const double n = static_cast<double>(f.grid.size());
  return sum / (n * n);
}

double field_dot(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) fail(errc::dimension_mismatch, "field_dot: grid mismatch");
  return dot(a.values, b.values);
}

}  // namespace ssem
