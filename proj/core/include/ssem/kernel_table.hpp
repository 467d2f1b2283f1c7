#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ssem/grid.hpp"

namespace ssem {

/// Fundamental solution h = S_p^{-1} delta of the smoother on the torus,
/// computed on a fine grid (4096^2 in 2D, 512^3 in 3D) and stored on a
/// coarser 256^d grid. h is even, peaks at the origin, and its pairwise
/// evaluations at boundary-point differences form the boundary block of
/// the PCG preconditioner.
struct KernelTable {
  int p_effective = 0;
  int dim = 0;
  int fine_m = 0;
  int store_m = 0;
  std::vector<double> values;  // store_m^d, grid flat ordering

  /// Evaluates h at an arbitrary offset by tensor-product local cubic
  /// interpolation on the storage grid; coordinates are wrapped into the
  /// torus first.
  double value_at(Point y) const;

  double at_origin() const;
};

/// Builds the table for smoother order p_effective (the Neumann problem
/// passes p-1). Exact restriction of the fine-grid solve: the fine-lattice
/// multiplier sum is folded onto the storage lattice before a single
/// storage-sized transform.
KernelTable build_kernel_table(int p_effective, int dim);

/// Binary cache format: magic "SSEMKTBL", then five little-endian uint32
/// fields (format version, dim, p_effective, fine_m, store_m) followed by
/// store_m^dim IEEE doubles in grid flat order.
void write_kernel_table(const KernelTable& table, const std::filesystem::path& path);
KernelTable read_kernel_table(const std::filesystem::path& path);

/// Cache filename used under a cache directory, keyed by (p_effective, dim).
std::filesystem::path kernel_cache_filename(int p_effective, int dim);

/// Loads the cached table if present, otherwise builds it and writes the
/// cache (atomic write-then-rename). An empty cache_dir skips caching.
KernelTable load_or_build_kernel_table(int p_effective, int dim,
                                       const std::filesystem::path& cache_dir);

}  // namespace ssem
