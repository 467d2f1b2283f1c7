#include "ssem/extension.hpp"

#include <cmath>
#include <numbers>

namespace ssem {

Field extend(const Grid& grid, const DomainSpec& domain,
             std::span<const double> interior_values, int p,
             const ExtensionOptions& options) {
  ConstraintSystem sys = ConstraintSystem::build_restriction(
      grid, domain, std::vector<double>(interior_values.begin(), interior_values.end()));
  if (options.solver == SolverKind::qr) return solve_qr(sys, p).u;

  PcgOptions pcg;
  pcg.tol = options.tol;
  pcg.max_iter = options.max_iter;
  pcg.kernel_cache_dir = options.kernel_cache_dir;
  return pcg_solve(sys, p, pcg).u;
}

double sobolev_seminorm(const Field& f, int s) {
  if (s < 1 || s > 4)
    fail(errc::unsupported_order, "seminorm order s must lie in [1,4]");
  // Parseval: the squared L2(box) norm of the s-th gradient tensor (all
  // order-s derivatives with multinomial weights) is
  // (2 pi)^d / N^2 * sum_k |k|^{2s} |u_k|^2.
  const double power = spectral_power(f, [s](std::span<const int> k) {
    double k2 = 0.0;
    for (int v : k) k2 += double(v) * v;
    return std::pow(k2, s);
  });
  const double box = std::pow(2.0 * std::numbers::pi, f.grid.dim());
  return std::sqrt(box * power);
}

}  // namespace ssem
