#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ssem/grid.hpp"

namespace ssem {

/// Real Fourier multiplier evaluated on signed integer frequency vectors
/// (length = grid dimension, entries in {-m/2, ..., m/2-1}).
using RealSymbol = std::function<double(std::span<const int>)>;

/// Applies a diagonal Fourier multiplier: F^{-1} diag(sigma(k)) F.
///
/// The forward transform is the unnormalized sum over nodes, the inverse
/// carries the 1/m^d factor, so multipliers act on integer frequencies with
/// no hidden scale. sigma must be finite on the whole lattice and must
/// produce a real output field (even symbols always do).
Field apply_symbol(const Field& f, const RealSymbol& sigma);

/// Spectral partial derivative with per-axis orders (total order <= 2).
/// Multiplier (ik)^orders; the Nyquist component k = -m/2 is zeroed on any
/// axis with odd derivative order so outputs stay real.
Field partial_derivative(const Field& f, const std::array<int, 3>& orders);

enum class SmootherPower { inverse, inverse_half };

/// Inverse smoother action: multiplier (1+|k|^2)^{-p} (or ^{-p/2} for
/// inverse_half). Requires 1 <= p <= 10; beyond that the multiplier falls
/// below machine precision on realistic grids.
Field smoother_apply(const Field& f, int p, SmootherPower power);

/// Evaluates the trigonometric interpolant of f at arbitrary points of
/// [-pi,pi)^d by direct summation over Fourier modes. Exact (to roundoff)
/// for band-limited fields and reproduces grid samples at the nodes.
/// The Nyquist mode contributes cos((m/2)(x+pi)) so the interpolant is real.
std::vector<double> evaluate_offgrid(const Field& f, std::span<const Point> points);

/// Exact transpose of evaluate_offgrid with respect to the unweighted
/// Euclidean inner products on grid values and point values.
Field evaluate_offgrid_adjoint(const Grid& grid, std::span<const double> weights,
                               std::span<const Point> points);

/// Weighted spectral power sum_k w(k) |u_k|^2 / N^2 with the unnormalized
/// forward coefficients u_k. For w = 1 this is the mean square of the node
/// values; growing weights stay numerically stable because no inverse
/// transform is involved.
double spectral_power(const Field& f, const RealSymbol& weight);

/// Euclidean inner product of the node values of two fields.
double field_dot(const Field& a, const Field& b);

}  // namespace ssem
