#include "ssem/kernel_table.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

namespace ssem {

namespace {

constexpr int kStoreM = 256;
constexpr char kMagic[9] = "SSEMKTBL";
constexpr std::uint32_t kFormatVersion = 1;

int fine_resolution(int dim) { return dim == 2 ? 4096 : 512; }

double int_pow_inv(double base, int p) {
  double pw = base;
  for (int i = 1; i < p; ++i) pw *= base;
  return 1.0 / pw;
}

std::int64_t pow_int(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

KernelTable build_kernel_table(int p_effective, int dim) {
  if (p_effective < 1)
    fail(errc::unsupported_order,
         "kernel table needs p_effective >= 1 (Neumann with p = 1 is unsupported)");
  if (dim != 2 && dim != 3)
    fail(errc::unsupported_dimension, "kernel tables exist for d = 2 and d = 3");

  const int fine_m = fine_resolution(dim);
  const int M = kStoreM;
  const int n_alias = fine_m / M;
  const std::int64_t n_store = pow_int(M, dim);

  // Sampling the fine-grid solution on the storage nodes aliases the fine
  // lattice onto the storage lattice: fold (1+|k|^2)^{-p} over all fine
  // frequencies congruent to each storage frequency, then transform once
  // at storage size. Identical to restricting the fine-grid field.
  std::vector<std::vector<int>> alias_freqs(M);
  for (int b = 0; b < M; ++b) {
    const int q = signed_frequency(b, M);
    alias_freqs[b].reserve(n_alias);
    for (int t = -n_alias; t <= n_alias; ++t) {
      const int k = q + M * t;
      if (k >= -fine_m / 2 && k < fine_m / 2) alias_freqs[b].push_back(k);
    }
  }

  std::vector<std::complex<double>> bins(n_store);
  if (dim == 2) {
    for (int b0 = 0; b0 < M; ++b0)
      for (int b1 = 0; b1 < M; ++b1) {
        double acc = 0.0;
        for (int ka : alias_freqs[b0]) {
          const double ka2 = double(ka) * ka;
          for (int kb : alias_freqs[b1])
            acc += int_pow_inv(1.0 + ka2 + double(kb) * kb, p_effective);
        }
        const int q0 = signed_frequency(b0, M), q1 = signed_frequency(b1, M);
        const double sign = ((std::abs(q0) + std::abs(q1)) % 2 == 0) ? 1.0 : -1.0;
        bins[static_cast<std::int64_t>(b0) * M + b1] = sign * acc;
      }
  } else {
    for (int b0 = 0; b0 < M; ++b0)
      for (int b1 = 0; b1 < M; ++b1) {
        const std::int64_t base = (static_cast<std::int64_t>(b0) * M + b1) * M;
        for (int b2 = 0; b2 < M; ++b2) {
          double acc = 0.0;
          for (int ka : alias_freqs[b0]) {
            const double ka2 = double(ka) * ka;
            for (int kb : alias_freqs[b1]) {
              const double kab2 = ka2 + double(kb) * kb;
              for (int kc : alias_freqs[b2])
                acc += int_pow_inv(1.0 + kab2 + double(kc) * kc, p_effective);
            }
          }
          const int q0 = signed_frequency(b0, M), q1 = signed_frequency(b1, M),
                    q2 = signed_frequency(b2, M);
          const double sign =
              ((std::abs(q0) + std::abs(q1) + std::abs(q2)) % 2 == 0) ? 1.0 : -1.0;
          bins[base + b2] = sign * acc;
        }
      }
  }

  // Node j sits at -pi + 2 pi j / M, hence the parity signs above and a
  // plain unnormalized backward transform here.
  std::vector<std::complex<double>> out(n_store);
  {
    int dims[3] = {M, M, M};
    fftw_plan plan = fftw_plan_dft(dim, dims,
                                   reinterpret_cast<fftw_complex*>(bins.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  KernelTable table;
  table.p_effective = p_effective;
  table.dim = dim;
  table.fine_m = fine_m;
  table.store_m = M;
  table.values.resize(n_store);
  const double scale = std::pow(2.0 * std::numbers::pi, -dim);
  for (std::int64_t i = 0; i < n_store; ++i) table.values[i] = out[i].real() * scale;
  return table;
}

double KernelTable::at_origin() const {
  const int M = store_m;
  std::int64_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = flat * M + M / 2;  // node at x = 0
  return values[flat];
}

double KernelTable::value_at(Point y) const {
  const int M = store_m;
  const double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / M;

  int base_idx[3];
  double w[3][4];
  for (int a = 0; a < dim; ++a) {
    double v = std::fmod(y[a] + std::numbers::pi, two_pi);
    if (v < 0.0) v += two_pi;
    const double t = v / h;                  // in [0, M)
    int i0 = static_cast<int>(std::floor(t));
    if (i0 >= M) i0 = M - 1;                 // guard the t == M roundoff edge
    const double xi = t - i0;
    base_idx[a] = i0;
    // cubic Lagrange weights on equispaced nodes at offsets -1, 0, 1, 2
    w[a][0] = -xi * (xi - 1.0) * (xi - 2.0) / 6.0;
    w[a][1] = (xi * xi - 1.0) * (xi - 2.0) / 2.0;
    w[a][2] = -xi * (xi + 1.0) * (xi - 2.0) / 2.0;
    w[a][3] = xi * (xi * xi - 1.0) / 6.0;
  }

  auto wrapped = [M](int i) { return ((i % M) + M) % M; };
  double acc = 0.0;
  if (dim == 2) {
    for (int a = 0; a < 4; ++a) {
      const std::int64_t row =
          static_cast<std::int64_t>(wrapped(base_idx[0] + a - 1)) * M;
      for (int b = 0; b < 4; ++b)
        acc += w[0][a] * w[1][b] * values[row + wrapped(base_idx[1] + b - 1)];
    }
  } else {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const std::int64_t row =
            (static_cast<std::int64_t>(wrapped(base_idx[0] + a - 1)) * M +
             wrapped(base_idx[1] + b - 1)) *
            M;
        const double wab = w[0][a] * w[1][b];
        for (int c = 0; c < 4; ++c)
          acc += wab * w[2][c] * values[row + wrapped(base_idx[2] + c - 1)];
      }
  }
  return acc;
}

void write_kernel_table(const KernelTable& table, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  // unique temp name, then rename: readers never see a partial file
  static std::mt19937_64 rng(std::random_device{}());
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(errc::io_failure, "cannot open " + tmp.string() + " for writing");
    out.write(kMagic, 8);
    const std::uint32_t header[5] = {
        kFormatVersion, static_cast<std::uint32_t>(table.dim),
        static_cast<std::uint32_t>(table.p_effective),
        static_cast<std::uint32_t>(table.fine_m),
        static_cast<std::uint32_t>(table.store_m)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(table.values.data()),
              static_cast<std::streamsize>(table.values.size() * sizeof(double)));
    if (!out) fail(errc::io_failure, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

KernelTable read_kernel_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open kernel table " + path.string());
  char magic[8];
  std::uint32_t header[5];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    fail(errc::invalid_data, "not a kernel table file: " + path.string());
  if (header[0] != kFormatVersion)
    fail(errc::invalid_data, "unsupported kernel table format version");
  KernelTable table;
  table.dim = static_cast<int>(header[1]);
  table.p_effective = static_cast<int>(header[2]);
  table.fine_m = static_cast<int>(header[3]);
  table.store_m = static_cast<int>(header[4]);
  const std::int64_t n = pow_int(table.store_m, table.dim);
  table.values.resize(n);
  in.read(reinterpret_cast<char*>(table.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) fail(errc::invalid_data, "truncated kernel table " + path.string());
  return table;
}

std::filesystem::path kernel_cache_filename(int p_effective, int dim) {
  return "kernel_p" + std::to_string(p_effective) + "_d" + std::to_string(dim) + ".bin";
}

KernelTable load_or_build_kernel_table(int p_effective, int dim,
                                       const std::filesystem::path& cache_dir) {
  if (cache_dir.empty()) return build_kernel_table(p_effective, dim);
  const auto path = cache_dir / kernel_cache_filename(p_effective, dim);
  if (std::filesystem::exists(path)) {
    KernelTable table = read_kernel_table(path);
    if (table.p_effective == p_effective && table.dim == dim) return table;
    fail(errc::invalid_data, "kernel cache file " + path.string() +
                                 " does not match its requested key");
  }
  KernelTable table = build_kernel_table(p_effective, dim);
  write_kernel_table(table, path);
  return table;
}

}  // namespace ssem
