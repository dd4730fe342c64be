#include <instanton_gas/error.hpp>
#include <instanton_gas/schrodinger.hpp>
#include <instanton_gas/spectrum.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace instanton_gas {

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  g.points = 2 * (points - 1) + 1;
  return g;
}

GridSpec benchmark_grid() { return GridSpec{-3.5, 3.5, 4001, std::nullopt}; }

GridSpec confining_grid(const PotentialFunction& potential, double expected_level, int points,
                        double factor) {
  const double threshold = factor * expected_level;
  double L = 0.5;
  while (potential(-L) < threshold || potential(L) < threshold) {
    L += 0.05;
    if (L > 1e4) invalid_argument("expected_level", "potential does not reach the threshold");
  }
  return GridSpec{-L, L, points, threshold};
}

TridiagonalOperator discretize(const PotentialFunction& potential, const GridSpec& grid) {
  if (grid.points < 3) invalid_argument("points", "grid needs at least 3 points");
  if (!(grid.x_max > grid.x_min)) invalid_argument("x_max", "grid requires x_max > x_min");
  if (grid.min_boundary_potential) {
    const double threshold = *grid.min_boundary_potential;
    if (potential(grid.x_min) < threshold || potential(grid.x_max) < threshold) {
      std::ostringstream msg;
      msg << "domain too small: boundary potential below confinement threshold " << threshold;
      throw Error("domain_too_small", msg.str(), "x_min");
    }
  }
  const double h = grid.spacing();
  TridiagonalOperator op;
  op.grid = grid;
  op.off_diagonal = -0.5 / (h * h);
  op.diagonal.reserve(static_cast<std::size_t>(grid.points - 2));
  for (int k = 1; k + 1 < grid.points; ++k)
    op.diagonal.push_back(1.0 / (h * h) + potential(grid.x_min + k * h));
  return op;
}

TridiagonalOperator discretize(const PolynomialPotential& potential, const GridSpec& grid) {
  return discretize([&](double x) { return potential(x); }, grid);
}

std::size_t sturm_count(const TridiagonalOperator& op, double x) {
  const double e2 = op.off_diagonal * op.off_diagonal;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < op.size(); ++i) {
    q = op.diagonal[i] - x - (i == 0 ? 0.0 : e2 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(const TridiagonalOperator& op, int count) {
  if (count < 1 || count > 4) invalid_argument("count", "count must be in [1, 4]");
  if (op.size() < static_cast<std::size_t>(count))
    invalid_argument("count", "operator smaller than requested count");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const double radius = 2.0 * std::abs(op.off_diagonal);
  for (double d : op.diagonal) {
    lo = std::min(lo, d - radius);
    hi = std::max(hi, d + radius);
  }
  auto bracket_failure = [&](const std::string& why) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "bisection bracket failure (" << why << "); Gershgorin bounds [" << lo << ", " << hi
        << "]";
    throw Error("bracket_failure", msg.str());
  };
  if (!std::isfinite(lo) || !std::isfinite(hi)) bracket_failure("non-finite operator entries");
  if (sturm_count(op, lo) != 0 || sturm_count(op, hi) != op.size())
    bracket_failure("Sturm count inconsistent at the bounds");

  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    double a = k == 0 ? lo : out.back();
    double b = hi;
    while (b - a > 1e-12 * std::max(1.0, std::abs(0.5 * (a + b)))) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(op, mid) > static_cast<std::size_t>(k))
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<double> eigenvector(const TridiagonalOperator& op, double eigenvalue) {
  const std::size_t n = op.size();
  const double e = op.off_diagonal;
  const double shift = eigenvalue + 1e-10 * std::max(1.0, std::abs(eigenvalue));
  std::vector<double> v(n, 1.0), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * std::sin(0.7 * static_cast<double>(i));
  for (int iteration = 0; iteration < 4; ++iteration) {
    // Thomas solve of (A - shift) y = v.
    double denom = op.diagonal[0] - shift;
    c[0] = e / denom;
    d[0] = v[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = op.diagonal[i] - shift - e * c[i - 1];
      if (denom == 0.0) denom = 1e-300;
      c[i] = e / denom;
      d[i] = (v[i] - e * d[i - 1]) / denom;
    }
    v[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) v[i] = d[i] - c[i] * v[i + 1];
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

double parity_overlap(const std::vector<double>& psi) {
  double overlap = 0.0;
  double norm = 0.0;
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i) {
    overlap += psi[i] * psi[n - 1 - i];
    norm += psi[i] * psi[i];
  }
  return overlap / norm;
}

GapEstimate numeric_gap(const PotentialFunction& potential, const GridSpec& grid) {
  const auto coarse = lowest_eigenvalues(discretize(potential, grid), 2);
  const auto fine = lowest_eigenvalues(discretize(potential, grid.refined()), 2);
  GapEstimate g;
  g.gap_coarse = coarse[1] - coarse[0];
  g.gap = fine[1] - fine[0];
  g.error_estimate = std::abs(g.gap - g.gap_coarse) / 3.0;
  return g;
}

GapEstimate numeric_gap(const PolynomialPotential& potential, const GridSpec& grid) {
  return numeric_gap([&](double x) { return potential(x); }, grid);
}

double richardson_ratio(const PotentialFunction& potential, const GridSpec& grid, int level) {
  if (level < 0 || level > 3) invalid_argument("level", "level must be in [0, 3]");
  const GridSpec half = grid.refined();
  const GridSpec quarter = half.refined();
  const double e1 = lowest_eigenvalues(discretize(potential, grid), level + 1)[level];
  const double e2 = lowest_eigenvalues(discretize(potential, half), level + 1)[level];
  const double e4 = lowest_eigenvalues(discretize(potential, quarter), level + 1)[level];
  return (e1 - e2) / (e2 - e4);
}

BenchmarkRecord benchmark_point(double lambda, double b, const GridSpec& grid) {
  const auto potential = PolynomialPotential::benchmark(lambda, b);
  std::vector<WellMinimum> wells;
  for (const auto& w : find_minima(potential))
    if (w.harmonic) wells.push_back(w);
  if (wells.size() != 2) throw Error("no_wells", "benchmark potential must have two harmonic wells");
  const auto params = well_parameters(potential, wells[0], wells[1], std::nullopt, 1.0);
  const auto gap = numeric_gap(potential, grid);

  BenchmarkRecord r;
  r.lambda = lambda;
  r.s_inst = *params.s_inst;
  r.omega0 = params.omega0;
  r.omega1 = params.omega1;
  r.gap_numeric = gap.gap;
  r.b_prime = extract_coupling(gap.gap, params.omega0, params.omega1).coupling;
  r.refinement_error = gap.error_estimate;
  return r;
}

unsigned worker_count() {
  if (const char* env = std::getenv("INSTANTON_GAS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      invalid_argument("INSTANTON_GAS_THREADS", "must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ScalingStudy scaling_study(double b, const std::vector<double>& lambdas,
                           std::optional<double> K_hint, const GridSpec& grid) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end()) ||
      std::adjacent_find(lambdas.begin(), lambdas.end()) != lambdas.end())
    invalid_argument("lambdas", "lambdas must be strictly ascending");

  // Each lambda is independent; results land in their own slot so the output
  // order never depends on scheduling.
  const std::size_t n = lambdas.size();
  std::vector<BenchmarkRecord> computed(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        computed[i] = benchmark_point(lambdas[i], b, grid);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  ScalingStudy study;
  study.b = b;
  for (const auto& r : computed) {
    const double half_split = (r.omega1 - r.omega0) / 2.0;
    const double excess = r.gap_numeric * r.gap_numeric - half_split * half_split;
    const double uncertainty = 2.0 * r.gap_numeric * r.refinement_error;
    std::ostringstream why;
    if (r.b_prime <= 0.0) {
      why << "asymmetry-dominated: gap " << r.gap_numeric << " <= |w1-w0|/2 = " << std::abs(half_split);
    } else if (!(excess > 10.0 * uncertainty)) {
      why << "regime guard: gap^2 - delta^2 = " << excess << " not above 10x uncertainty "
          << uncertainty;
    }
    if (!why.str().empty()) {
      study.excluded.push_back({r.lambda, why.str()});
      continue;
    }
    study.records.push_back(r);
    if (K_hint) {
      const auto params =
          WellParameters::from_instanton(r.omega0, r.omega1, *K_hint, r.s_inst, 1.0);
      study.predicted_gaps.push_back(energies(params).gap);
    }
  }

  if (study.records.size() < 3) {
    std::ostringstream msg;
    msg << "scaling study needs at least 3 usable points, got " << study.records.size();
    for (const auto& e : study.excluded) msg << "; lambda " << e.lambda << " excluded (" << e.reason << ")";
    throw Error("too_few_points", msg.str(), "lambdas");
  }

  const double count = static_cast<double>(study.records.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& r : study.records) {
    sx += r.s_inst;
    sy += std::log(r.b_prime);
  }
  const double mx = sx / count;
  const double my = sy / count;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : study.records) {
    sxy += (r.s_inst - mx) * (std::log(r.b_prime) - my);
    sxx += (r.s_inst - mx) * (r.s_inst - mx);
  }
  study.slope = sxy / sxx;
  study.intercept = my - study.slope * mx;
  for (const auto& r : study.records)
    study.residuals.push_back(std::log(r.b_prime) - (study.intercept + study.slope * r.s_inst));
  return study;
}

}  // namespace instanton_gas
