#include "ssem/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

namespace ssem {

namespace {

double sq(double x) { return x * x; }

CatalogProblem make_exp1() {
  CatalogProblem pb;
  pb.name = "exp1";
  pb.domain = domains::disc();
  pb.op = InteriorOperatorSpec::negative_laplacian(2);
  pb.f = [](Point p) { return 6.0 * (p[1] - p[0]); };  // -Laplace(x^3 - y^3)
  pb.g = [](Point p) { return p[0] * p[0] * p[0] - p[1] * p[1] * p[1]; };
  pb.exact = pb.g;
  return pb;
}

CatalogProblem make_exp2() {
  CatalogProblem pb;
  pb.name = "exp2";
  pb.domain = domains::disc();
  OperatorTerm txx;
  txx.orders = {2, 0, 0};
  txx.coeff = [](Point p) { return -(2.0 + p[1]); };
  OperatorTerm tyy;
  tyy.orders = {0, 2, 0};
  tyy.coeff = [](Point p) { return -(2.0 - p[0]); };
  pb.op.terms = {txx, tyy};
  pb.f = [](Point p) {
    return -6.0 * p[0] * (2.0 + p[1]) + 6.0 * p[1] * (2.0 - p[0]);
  };
  pb.g = [](Point p) { return p[0] * p[0] * p[0] - p[1] * p[1] * p[1]; };
  pb.exact = pb.g;
  return pb;
}

CatalogProblem make_exp3() {
  CatalogProblem pb;
  pb.name = "exp3";
  pb.domain = domains::flower();
  pb.op = InteriorOperatorSpec::negative_laplacian(2);
  pb.f = [](Point) { return 0.0; };
  pb.g = [](Point p) { return p[0] * p[0] - p[1] * p[1]; };
  pb.exact = pb.g;
  return pb;
}

CatalogProblem make_exp4() {
  CatalogProblem pb;
  pb.name = "exp4";
  pb.domain = domains::disc();
  pb.op = InteriorOperatorSpec::negative_laplacian(2);
  pb.bc = BoundaryKind::neumann;
  pb.f = [](Point) { return 0.0; };
  pb.g = [](Point p) { return 2.0 * (p[0] * p[0] - p[1] * p[1]); };
  pb.exact = [](Point p) { return p[0] * p[0] - p[1] * p[1]; };
  pb.normalize_at_origin = true;
  return pb;
}

CatalogProblem make_exp5() {
  CatalogProblem pb;
  pb.name = "exp5";
  pb.domain = domains::disc();
  pb.op = InteriorOperatorSpec::negative_laplacian(2);
  pb.f = [](Point) { return 0.0; };
  pb.g = [](Point p) { return std::atan2(p[1], p[0]) >= 0.0 ? 1.0 : -1.0; };
  pb.exact = [](Point p) {
    return reference_nonsmooth(std::hypot(p[0], p[1]), std::atan2(p[1], p[0]));
  };
  pb.mask = {MaskBall{Point{1.0, 0.0, 0.0}, 0.2}, MaskBall{Point{-1.0, 0.0, 0.0}, 0.2}};
  return pb;
}

CatalogProblem make_exp6() {
  CatalogProblem pb;
  pb.name = "exp6";
  pb.dim = 3;
  pb.domain = domains::sphere();
  pb.op = InteriorOperatorSpec::negative_laplacian(3);
  pb.f = [](Point) { return 1.0; };
  pb.g = [](Point) { return 0.0; };
  pb.exact = [](Point p) {
    return (1.0 - (sq(p[0]) + sq(p[1]) + sq(p[2]))) / 6.0;
  };
  return pb;
}

// quadratic bump extended by the extension study
double extension_input(Point p) { return 0.25 * (1.0 - sq(p[0]) - sq(p[1])); }

bool masked(const Point& p, std::span<const MaskBall> mask, int dim) {
  for (const auto& ball : mask) {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) d2 += sq(p[a] - ball.center[a]);
    if (d2 < sq(ball.radius)) return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.ms.empty() || cfg.ps.empty())
    fail(errc::invalid_argument, "empty m or p list");
  for (int m : cfg.ms)
    if (m < 8 || m % 2 != 0)
      fail(errc::invalid_argument, "grid sizes must be even and >= 8");
  for (int p : cfg.ps) {
    if (cfg.solver == SolverKind::qr && (p < 0 || p > 10))
      fail(errc::invalid_argument, "QR supports p in [0,10]");
    if (cfg.solver == SolverKind::pcg && (p < 2 || p > 4))
      fail(errc::invalid_argument, "PCG supports p in {2,3,4}");
  }
}

std::string solver_name(SolverKind s) { return s == SolverKind::qr ? "qr" : "pcg"; }

struct SolveOutcome {
  Field u;
  double residual = 0.0;
  double seconds = 0.0;
  std::optional<int> iterations;
  std::optional<double> cond_estimate;
};

SolveOutcome solve_system(const ConstraintSystem& sys, int p, const ExperimentConfig& cfg) {
  SolveOutcome out{Field(sys.grid())};
  if (cfg.solver == SolverKind::qr) {
    QrSolveReport rep = solve_qr(sys, p);
    out.u = std::move(rep.u);
    out.residual = rep.constraint_residual_inf;
    out.seconds = rep.assembly_seconds + rep.factor_seconds + rep.solve_seconds;
  } else {
    PcgOptions opt;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    opt.kernel_cache_dir = cfg.kernel_cache_dir;
    PcgReport rep = pcg_solve(sys, p, opt);
    out.u = std::move(rep.u);
    out.residual = sys.constraint_residual(out.u);
    out.seconds = rep.precond_build_seconds + rep.iterate_seconds;
    out.iterations = rep.iterations;
    if (rep.condition_estimate > 0.0) out.cond_estimate = rep.condition_estimate;
  }
  return out;
}

void fit_slopes(ConvergenceReport& report) {
  std::map<int, std::pair<std::vector<double>, std::vector<int>>> by_p;
  for (const auto& row : report.rows) {
    if (row.failed) continue;
    // pre-plateau rows only: ignore errors at the roundoff floor
    if (!(row.l2_error > 1e-12 * row.exact_l2) || row.l2_error <= 0.0) continue;
    by_p[row.p].first.push_back(row.l2_error);
    by_p[row.p].second.push_back(row.m);
  }
  for (auto& [p, data] : by_p) {
    if (data.first.size() < 3) continue;
    report.slope_by_p[p] = fit_rate(data.first, data.second);
  }
}

void write_extra_outputs(const ExperimentConfig& cfg, const ConstraintSystem& sys,
                         const Field& u, int m, int p) {
  if (cfg.output_dir.empty() || cfg.problem != "exp5") return;
  // samples of the solution along r = 0.9, 0 <= theta <= pi
  std::vector<Point> pts;
  for (int i = 0; i <= 180; ++i) {
    const double th = std::numbers::pi * i / 180.0;
    pts.push_back(Point{0.9 * std::cos(th), 0.9 * std::sin(th), 0.0});
  }
  const auto vals = evaluate_offgrid(u, pts);
  std::ofstream out(cfg.output_dir /
                    ("exp5_curve_m" + std::to_string(m) + "_p" + std::to_string(p) + ".csv"));
  out << "theta,value,reference\n";
  for (int i = 0; i <= 180; ++i) {
    const double th = std::numbers::pi * i / 180.0;
    out << format_double(th) << ',' << format_double(vals[i]) << ','
        << format_double(reference_nonsmooth(0.9, th)) << '\n';
  }
  (void)sys;
}

ConvergenceReport run_standard(const ExperimentConfig& cfg) {
  const CatalogProblem pb = catalog_problem(cfg.problem);
  ConvergenceReport report;
  const double density =
      cfg.boundary_density.value_or(default_density_factor(cfg.solver, pb.dim));

  for (int m : cfg.ms) {
    const Grid grid(pb.dim, m);
    std::optional<ConstraintSystem> sys;
    std::string build_error;
    try {
      sys = ConstraintSystem::build(grid, pb.domain, pb.op, pb.bc, density, pb.f, pb.g);
    } catch (const Error& e) {
      build_error = e.what();
    }
    for (int p : cfg.ps) {
      StudyRow row;
      row.problem = cfg.problem;
      row.m = m;
      row.p = p;
      row.solver = solver_name(cfg.solver);
      if (!sys) {
        row.failed = true;
        row.message = build_error;
        report.rows.push_back(row);
        continue;
      }
      row.n_interior = sys->n_interior();
      row.n_boundary = sys->n_boundary();
      try {
        const SolveOutcome out = solve_system(*sys, p, cfg);
        const auto [l2, linf] =
            error_norms(out.u, pb.exact, sys->interior(), grid, pb.mask);
        row.l2_error = l2;
        row.linf_error = linf;
        row.residual = out.residual;
        row.iterations = out.iterations;
        row.cond_estimate = out.cond_estimate;
        row.seconds = out.seconds;
        // reference-solution norm = "error" of the zero field
        row.exact_l2 =
            error_norms(Field(grid), pb.exact, sys->interior(), grid, pb.mask).first;
        write_extra_outputs(cfg, *sys, out.u, m, p);
      } catch (const Error& e) {
        row.failed = true;
        row.message = e.what();
      }
      report.rows.push_back(row);
    }
  }
  fit_slopes(report);
  return report;
}

ConvergenceReport run_extension(const ExperimentConfig& cfg) {
  ConvergenceReport report;
  const DomainSpec domain = domains::disc();
  std::ofstream seminorms;
  if (!cfg.output_dir.empty()) {
    seminorms.open(cfg.output_dir / "extension_seminorms.csv");
    seminorms << "m,p,grad2,grad3,grad4\n";
  }
  for (int m : cfg.ms) {
    const Grid grid(2, m);
    const InteriorIndexSet interior = classify_interior(grid, domain);
    std::vector<double> input(interior.indices.size());
    for (std::size_t i = 0; i < input.size(); ++i)
      input[i] = extension_input(grid.node_point(interior.indices[i]));
    for (int p : cfg.ps) {
      StudyRow row;
      row.problem = "extension";
      row.m = m;
      row.p = p;
      row.solver = solver_name(cfg.solver);
      row.n_interior = interior.count();
      try {
        ExtensionOptions opt;
        opt.solver = cfg.solver;
        opt.tol = cfg.tol;
        opt.max_iter = cfg.max_iter;
        opt.kernel_cache_dir = cfg.kernel_cache_dir;
        const auto t0 = std::chrono::steady_clock::now();
        const Field ext = extend(grid, domain, input, p, opt);
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // restriction error doubles as the constraint residual here
        double linf = 0.0, l2 = 0.0;
        const double cell = std::pow(grid.spacing(), grid.dim());
        for (std::size_t i = 0; i < input.size(); ++i) {
          const double d = ext.values[interior.indices[i]] - input[i];
          linf = std::max(linf, std::abs(d));
          l2 += cell * d * d;
        }
        row.l2_error = std::sqrt(l2);
        row.linf_error = linf;
        row.residual = linf / (1.0 + inf_norm(input));
        if (seminorms.is_open())
          seminorms << m << ',' << p << ',' << format_double(sobolev_seminorm(ext, 2))
                    << ',' << format_double(sobolev_seminorm(ext, 3)) << ','
                    << format_double(sobolev_seminorm(ext, 4)) << '\n';
      } catch (const Error& e) {
        row.failed = true;
        row.message = e.what();
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

ConvergenceReport run_mismatch_demo(const ExperimentConfig& cfg) {
  // p = 0 (no regularization) against p = 2 on the disc problem; the
  // interesting number is the near-boundary max error ratio.
  ConvergenceReport report;
  const CatalogProblem pb = catalog_problem("exp1");
  const double density =
      cfg.boundary_density.value_or(default_density_factor(SolverKind::qr, pb.dim));
  for (int m : cfg.ms) {
    const Grid grid(pb.dim, m);
    const ConstraintSystem sys =
        ConstraintSystem::build(grid, pb.domain, pb.op, pb.bc, density, pb.f, pb.g);
    // near-boundary band: interior nodes within 3 spacings of the boundary set
    std::vector<std::int64_t> band;
    for (std::int64_t idx : sys.interior().indices) {
      const Point x = grid.node_point(idx);
      double dist = std::numeric_limits<double>::max();
      for (const Point& y : sys.boundary().points)
        dist = std::min(dist, std::hypot(x[0] - y[0], x[1] - y[1]));
      if (dist <= 3.0 * grid.spacing()) band.push_back(idx);
    }
    for (int p : {0, 2}) {
      StudyRow row;
      row.problem = "mismatch-demo";
      row.m = m;
      row.p = p;
      row.solver = "qr";
      row.n_interior = sys.n_interior();
      row.n_boundary = sys.n_boundary();
      try {
        QrSolveReport rep = solve_qr(sys, p);
        double band_linf = 0.0;
        for (std::int64_t idx : band)
          band_linf = std::max(band_linf,
                               std::abs(rep.u.values[idx] - pb.exact(grid.node_point(idx))));
        const auto [l2, linf] = error_norms(rep.u, pb.exact, sys.interior(), grid);
        row.l2_error = l2;
        row.linf_error = band_linf;  // band max error; full-domain value in l2
        row.residual = rep.constraint_residual_inf;
        row.seconds = rep.assembly_seconds + rep.factor_seconds + rep.solve_seconds;
        (void)linf;
      } catch (const Error& e) {
        row.failed = true;
        row.message = e.what();
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace

CatalogProblem catalog_problem(const std::string& id) {
  if (id == "exp1") return make_exp1();
  if (id == "exp2") return make_exp2();
  if (id == "exp3") return make_exp3();
  if (id == "exp4") return make_exp4();
  if (id == "exp5") return make_exp5();
  if (id == "exp6") return make_exp6();
  fail(errc::invalid_argument, "unknown problem id '" + id + "'");
}

std::vector<std::string> catalog_ids() {
  return {"exp1", "exp2", "exp3", "exp4", "exp5", "exp6", "extension", "mismatch-demo"};
}

double default_density_factor(SolverKind solver, int dim) {
  if (dim == 2)
    return solver == SolverKind::qr ? kQrDensityFactor2d : kPcgDensityFactor2d;
  return solver == SolverKind::qr ? kQrDensityFactor3d : kPcgDensityFactor3d;
}

std::pair<double, double> error_norms(const Field& u,
                                      const std::function<double(Point)>& exact,
                                      const InteriorIndexSet& interior, const Grid& grid,
                                      std::span<const MaskBall> mask) {
  const double cell = std::pow(grid.spacing(), grid.dim());
  double l2 = 0.0, linf = 0.0;
  std::int64_t used = 0;
  for (std::int64_t idx : interior.indices) {
    const Point p = grid.node_point(idx);
    if (masked(p, mask, grid.dim())) continue;
    ++used;
    const double d = u.values[idx] - exact(p);
    l2 += cell * d * d;
    linf = std::max(linf, std::abs(d));
  }
  if (used == 0)
    fail(errc::degenerate_mask, "mask excludes every interior node");
  return {std::sqrt(l2), linf};
}

double reference_nonsmooth(double r, double theta) {
  if (r >= 1.0) fail(errc::out_of_range, "series solution requires r < 1");
  if (r < 0.0) fail(errc::out_of_range, "negative radius");
  if (r == 0.0) return 0.0;
  // smallest K with (4/pi) r^K / (K (1-r)) < 1e-12
  const double budget = 1e-12 * (1.0 - r) * std::numbers::pi / 4.0;
  double sum = 0.0;
  double rk = r;  // r^k
  const long k_cap = 4'000'001;
  for (long k = 1; k <= k_cap; k += 2) {
    sum += 4.0 / (k * std::numbers::pi) * rk * std::sin(k * theta);
    rk *= r * r;
    if (rk < budget * (k + 2)) return sum;
  }
  fail(errc::out_of_range, "series did not reach the tail bound; r too close to 1");
}

double fit_rate(std::span<const double> errors, std::span<const int> ms) {
  if (errors.size() != ms.size())
    fail(errc::dimension_mismatch, "fit_rate: length mismatch");
  if (errors.size() < 3)
    fail(errc::insufficient_data, "need at least 3 pre-plateau points to fit a rate");
  double sx = 0.0, sy = 0.0;
  const std::size_t n = errors.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0))
      fail(errc::invalid_data, "fit_rate: errors must be positive");
    xs[i] = -std::log(static_cast<double>(ms[i]));  // log(1/m)
    ys[i] = std::log(errors[i]);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  if (den == 0.0) fail(errc::insufficient_data, "fit_rate: all grid sizes equal");
  return num / den;
}

ConvergenceReport run_problem(const ExperimentConfig& config) {
  validate_config(config);
  if (!config.output_dir.empty())
    std::filesystem::create_directories(config.output_dir);

  ConvergenceReport report;
  if (config.problem == "extension") {
    report = run_extension(config);
  } else if (config.problem == "mismatch-demo") {
    report = run_mismatch_demo(config);
  } else {
    report = run_standard(config);
  }
  if (!config.output_dir.empty())
    write_csv(report, config.output_dir /
                          (config.problem + "_" + solver_name(config.solver) + ".csv"));
  return report;
}

std::string csv_header() {
  return "problem,m,p,solver,n_interior,n_boundary,l2_error,linf_error,residual,"
         "iterations,cond_estimate,seconds";
}

std::string csv_row(const StudyRow& row) {
  std::string s = row.problem + ',' + std::to_string(row.m) + ',' +
                  std::to_string(row.p) + ',' + row.solver + ',' +
                  std::to_string(row.n_interior) + ',' + std::to_string(row.n_boundary) +
                  ',';
  if (row.failed) {
    s += ",,,,,";
    return s;
  }
  s += format_double(row.l2_error) + ',' + format_double(row.linf_error) + ',' +
       format_double(row.residual) + ',';
  s += row.iterations ? std::to_string(*row.iterations) : "";
  s += ',';
  s += row.cond_estimate ? format_double(*row.cond_estimate) : "";
  s += ',';
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", row.seconds);
  s += buf;
  return s;
}

void write_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot write " + path.string());
  out << csv_header() << '\n';
  for (const auto& row : report.rows) out << csv_row(row) << '\n';
}

}  // namespace ssem
