#pragma once

#include <instanton_gas/potential.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace instanton_gas {

using PotentialFunction = std::function<double(double)>;

/// Uniform grid including both Dirichlet boundary points. When
/// `min_boundary_potential` is set, discretize() refuses potentials whose
/// boundary values fall below it.
struct GridSpec {
  double x_min = -3.5;
  double x_max = 3.5;
  int points = 4001;
  std::optional<double> min_boundary_potential;

  double spacing() const { return (x_max - x_min) / (points - 1); }
  /// Same domain with half the spacing.
  GridSpec refined() const;
};

/// [-3.5, 3.5] with 4001 points: the grid used for the benchmark family.
GridSpec benchmark_grid();

/// Symmetric domain [-L, L] with V(+-L) >= factor * expected_level, enforced
/// as the confinement threshold, and `points` grid points.
GridSpec confining_grid(const PotentialFunction& potential, double expected_level,
                        int points = 4001, double factor = 50.0);

/// -1/2 d^2/dx^2 + V on the interior points, second-order central differences.
struct TridiagonalOperator {
  std::vector<double> diagonal;  // 1/h^2 + V(x_k)
  double off_diagonal = 0.0;     // -1/(2h^2)
  GridSpec grid;

  std::size_t size() const { return diagonal.size(); }
};

TridiagonalOperator discretize(const PotentialFunction& potential, const GridSpec& grid);
TridiagonalOperator discretize(const PolynomialPotential& potential, const GridSpec& grid);

/// Number of eigenvalues strictly below x (Sturm sign count).
std::size_t sturm_count(const TridiagonalOperator& op, double x);

/// The `count` (<= 4) smallest eigenvalues by Sturm bisection, ascending.
std::vector<double> lowest_eigenvalues(const TridiagonalOperator& op, int count);

/// Normalized eigenvector for a computed eigenvalue (inverse iteration).
std::vector<double> eigenvector(const TridiagonalOperator& op, double eigenvalue);

/// <psi, P psi> / <psi, psi> with P the grid reflection about its midpoint.
double parity_overlap(const std::vector<double>& psi);

struct GapEstimate {
  double gap = 0.0;             // E1 - E0 on the refined grid
  double error_estimate = 0.0;  // |gap(h/2) - gap(h)| / 3
  double gap_coarse = 0.0;
};

GapEstimate numeric_gap(const PotentialFunction& potential, const GridSpec& grid);
GapEstimate numeric_gap(const PolynomialPotential& potential, const GridSpec& grid);

/// (E(h) - E(h/2)) / (E(h/2) - E(h/4)) for eigenvalue `level`; ~4 for a
/// second-order scheme.
double richardson_ratio(const PotentialFunction& potential, const GridSpec& grid, int level);

struct BenchmarkRecord {
  double lambda = 0.0;
  double s_inst = 0.0;
  double omega0 = 0.0;
  double omega1 = 0.0;
  double gap_numeric = 0.0;
  double b_prime = 0.0;
  double refinement_error = 0.0;
};

/// One benchmark point: lambda (x^2-1)^2 (x^2+bx+1) on `grid`.
BenchmarkRecord benchmark_point(double lambda, double b, const GridSpec& grid);

struct ExcludedPoint {
  double lambda = 0.0;
  std::string reason;
};

struct ScalingStudy {
  double b = 0.0;
  std::vector<BenchmarkRecord> records;  // usable points, ordered by lambda
  std::vector<ExcludedPoint> excluded;
  double slope = 0.0;                    // d ln B' / d S_inst
  double intercept = 0.0;
  std::vector<double> residuals;
  std::vector<double> predicted_gaps;    // from K_hint, aligned with records
};

/// Fits ln B' against S_inst across `lambdas` (ascending). Points whose
/// extraction is clamped or fails the regime guard (gap^2 - delta^2 must
/// exceed 10x its numerical uncertainty) are excluded; fewer than three usable
/// points is an error.
ScalingStudy scaling_study(double b, const std::vector<double>& lambdas,
                           std::optional<double> K_hint, const GridSpec& grid);

/// Worker cap from INSTANTON_GAS_THREADS (positive integer), else hardware
/// concurrency.
unsigned worker_count();

}  // namespace instanton_gas
