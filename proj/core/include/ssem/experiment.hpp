#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "ssem/extension.hpp"

namespace ssem {

/// Excluded ball for masked error norms.
struct MaskBall {
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

/// One entry of the experiment catalog: domain, operator, data, and the
/// reference solution used for error reporting.
struct CatalogProblem {
  std::string name;
  int dim = 2;
  DomainSpec domain;
  InteriorOperatorSpec op;
  BoundaryKind bc = BoundaryKind::dirichlet;
  std::function<double(Point)> f;
  std::function<double(Point)> g;
  std::function<double(Point)> exact;
  bool normalize_at_origin = false;  // Neumann: compare up to the constant
  std::vector<MaskBall> mask;        // cut out of the error norms
};

/// Catalog lookup. Ids: exp1 (disc Dirichlet, cubic), exp2 (nonconstant
/// coefficients), exp3 (flower, harmonic), exp4 (disc Neumann), exp5 (disc,
/// discontinuous boundary data), exp6 (ball). "extension" and
/// "mismatch-demo" are composite studies handled by run_problem.
CatalogProblem catalog_problem(const std::string& id);
std::vector<std::string> catalog_ids();

struct ExperimentConfig {
  std::string problem = "exp1";
  std::vector<int> ms = {16, 32, 64, 128};
  std::vector<int> ps = {2};
  SolverKind solver = SolverKind::qr;
  std::optional<double> boundary_density;  // geometry density factor override
  double tol = 1e-10;
  int max_iter = 500;
  std::filesystem::path output_dir;  // empty: no files written
  std::filesystem::path kernel_cache_dir = "kernel_cache";
};

struct StudyRow {
  std::string problem;
  int m = 0;
  int p = 0;
  std::string solver;
  std::int64_t n_interior = 0;
  std::int64_t n_boundary = 0;
  double l2_error = 0.0;
  double linf_error = 0.0;
  double residual = 0.0;  // |Cu-b|_inf / (1+|b|_inf)
  std::optional<int> iterations;
  std::optional<double> cond_estimate;
  double seconds = 0.0;
  bool failed = false;
  std::string message;
  double exact_l2 = 0.0;  // reference-solution norm, for the plateau cutoff
};

struct ConvergenceReport {
  std::vector<StudyRow> rows;
  // least-squares slope of log(error) vs log(1/m) over pre-plateau rows;
  // absent when fewer than three usable rows exist
  std::map<int, double> slope_by_p;
};

/// Runs the requested sweep, computes errors against the catalog reference
/// solution, fits rates, and (with an output directory) writes CSV files:
/// <problem>_<solver>.csv always, exp5_curve_m<m>.csv with the r = 0.9
/// samples for the discontinuous problem, extension_seminorms.csv for the
/// extension study. Per-row solver failures are recorded in the row and do
/// not abort the study.
ConvergenceReport run_problem(const ExperimentConfig& config);

/// Discrete interior error norms: l2 includes the cell volume factor
/// (2 pi / m)^d; both norms run over interior nodes outside the mask balls.
std::pair<double, double> error_norms(const Field& u,
                                      const std::function<double(Point)>& exact,
                                      const InteriorIndexSet& interior, const Grid& grid,
                                      std::span<const MaskBall> mask = {});

/// Reference solution of the discontinuous-data disc problem, summed as the
/// sine series with enough terms that the tail bound (4/pi) r^K / (K (1-r))
/// drops below 1e-12.
double reference_nonsmooth(double r, double theta);

/// Least-squares slope of log(error) against log(1/m). Requires at least
/// three points with positive errors.
double fit_rate(std::span<const double> errors, std::span<const int> ms);

double default_density_factor(SolverKind solver, int dim);

std::string csv_header();
std::string csv_row(const StudyRow& row);
void write_csv(const ConvergenceReport& report, const std::filesystem::path& path);

}  // namespace ssem
