// Acceptance suite. `acceptance <n>` checks criterion n and prints one line;
// `acceptance` with no argument runs all ten. Exit status is nonzero when any
// selected criterion fails.

#include <instanton_gas/error.hpp>
#include <instanton_gas/moments.hpp>
#include <instanton_gas/schrodinger.hpp>
#include <instanton_gas/spectrum.hpp>
#include <instanton_gas/triangle.hpp>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace instanton_gas;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::abs(b);
}

// Ordered frequency pairs from {1, 1.5, 2, 3} with w0 != w1, B in {0.1, 0.5, 1},
// T in {1, 2, 5}: 108 points.
std::vector<WellParameters> moment_grid() {
  const double omegas[] = {1.0, 1.5, 2.0, 3.0};
  std::vector<WellParameters> out;
  for (double w0 : omegas)
    for (double w1 : omegas) {
      if (w0 == w1) continue;
      for (double B : {0.1, 0.5, 1.0})
        for (double T : {1.0, 2.0, 5.0}) out.push_back(WellParameters::from_coupling(w0, w1, B, T));
    }
  return out;
}

Outcome three_way_agreement() {
  double worst = 0.0;
  const auto grid = moment_grid();
  for (const auto& p : grid) {
    const auto table = moment_recursive(8, 8, p);
    for (int n = 0; n <= 8; ++n)
      for (int m = 0; m <= 8; ++m) {
        const double q = moment_quadrature({n, m}, p).stripped;
        worst = std::max({worst, rel(moment_closed({n, m}, p).stripped, q),
                          rel(table.at(n, m).stripped, q)});
      }
  }
  return {worst <= 1e-8 && grid.size() == 108,
          std::to_string(grid.size()) + " points, n,m <= 8, max rel diff " + fmt(worst) + " (tol 1e-8)"};
}

Outcome exact_closed_form() {
  long compared = 0;
  long mismatches = 0;
  for (const auto& ratio : {Rational(1, 3), Rational(2, 5), Rational(7, 2)}) {
    const auto t = build_triangle(10, ratio);
    for (int n = 0; n <= 10; ++n)
      for (int m = 0; n + m <= 10; ++m) {
        ++compared;
        if (t.entry(n, m) != closed_form_coefficients({n, m}, ratio)) ++mismatches;
      }
  }
  return {mismatches == 0, std::to_string(compared) + " entries at ratios 1/3, 2/5, 7/2, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome column_identities() {
  long checked = 0;
  long failures = 0;
  long families = 0;
  for (const auto& ratio : {Rational(2, 5), Rational(1, 3), Rational(7, 2), Rational(-3, 4)}) {
    const auto report = verify_relations(build_triangle(12, ratio));
    families = static_cast<long>(report.families.size());
    for (const auto& f : report.families) {
      checked += f.checked;
      failures += f.failures;
    }
    checked += report.central.checked;
    failures += report.central.failures;
  }
  return {failures == 0 && checked > 0 && families == 4,
          "depth 12, 4 ratios, " + std::to_string(families) + " column families + central recurrence, " +
              std::to_string(checked) + " checks, " + std::to_string(failures) + " failures"};
}

Outcome series_closed_forms() {
  double worst = 0.0;
  bool converged = true;
  for (double x : {0.1, 0.25, 0.4}) {
    const auto s = series_a0_a1(x, 200);
    converged = converged && s.converged;
    const double half_inverse = 1.0 / (2.0 * x);  // delta / 2B
    const double a0_ref = 1.0 / (2.0 * std::sqrt(1.0 + half_inverse * half_inverse));
    const double a1_ref = 0.5 - 1.0 / (2.0 * std::sqrt(1.0 + (2.0 * x) * (2.0 * x)));
    worst = std::max({worst, std::abs(s.a0 - a0_ref), std::abs(s.a1 - a1_ref)});
  }
  return {worst <= 1e-10 && converged,
          "|B/delta| in {0.1, 0.25, 0.4}, 200 terms, max abs diff " + fmt(worst) + " (tol 1e-10)"};
}

Outcome gas_summation() {
  double worst = 0.0;
  int used = 0;
  for (const auto& p : moment_grid()) {
    if (p.coupling() * p.T > 2.0 || std::abs(p.delta) * p.T > 2.0) continue;
    ++used;
    worst = std::max(worst, rel(gas_sum_partial(p, 40).sum, gas_sum_closed(p).value));
  }
  for (double B : {0.1, 0.5, 1.0})
    for (double T : {1.0, 2.0}) {
      const auto p = WellParameters::from_coupling(1.5, 1.5, B, T);
      ++used;
      worst = std::max(worst, rel(gas_sum_partial(p, 40).sum, gas_sum_closed(p).value));
    }
  return {worst <= 1e-10 && used > 0,
          std::to_string(used) + " points with BT <= 2, |delta|T <= 2, max rel diff " + fmt(worst) +
              " (tol 1e-10)"};
}

Outcome truncated_hamiltonian_match() {
  double worst = 0.0;
  double worst_identity = 0.0;
  int matrices = 0;
  const double omegas[] = {1.0, 1.5, 2.0, 3.0};
  for (double w0 : omegas)
    for (double w1 : omegas)
      for (double B : {0.0, 0.1, 0.5, 1.0}) {
        if (w0 == w1) continue;
        ++matrices;
        Eigen::Matrix2d h;
        h << w0 / 2.0, B, B, w1 / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(h, Eigen::EigenvaluesOnly);
        const auto s = energies(WellParameters::from_coupling(w0, w1, B, 1.0));
        const double lo = solver.eigenvalues()(0);
        const double hi = solver.eigenvalues()(1);
        worst = std::max({worst, rel(s.e_plus, lo), rel(s.e_minus, hi)});
        const double eps = std::numeric_limits<double>::epsilon();
        const double trace = (w0 + w1) / 2.0;
        const double det = w0 * w1 / 4.0 - B * B;
        worst_identity =
            std::max({worst_identity, std::abs(s.e_plus + s.e_minus - trace) / (eps * std::abs(trace)),
                      std::abs(s.e_plus * s.e_minus - det) / (eps * (w0 * w1 / 4.0 + B * B))});
      }
  return {worst <= 1e-14 && worst_identity <= 8.0,
          std::to_string(matrices) + " matrices, max rel eigenvalue diff " + fmt(worst) +
              " (tol 1e-14), trace/det residual " + fmt(worst_identity) + " ulp"};
}

Outcome symmetric_limit() {
  double worst = 0.0;
  const double B = 0.5;
  const double T = 2.0;
  const double dT = 1e-6;
  const auto p = WellParameters::from_coupling(1.0 + dT / T, 1.0 - dT / T, B, T);
  const auto table = moment_recursive(5, 5, p);
  for (int i = 0; i <= 5; ++i) {
    double beta = 1.0;
    for (int k = 1; k <= 2 * i + 1; ++k) beta *= B * T / k;
    worst = std::max({worst, rel(moment_closed({i, i}, p).stripped, beta),
                      rel(table.at(i, i).stripped, beta), rel(multi_instanton(i, p).stripped, beta)});
  }
  double worst_gap = 0.0;
  for (double K : {0.5, 2.0, 7.0})
    for (double S : {1.0, 4.0, 10.0})
      for (double w : {1.0, 2.5}) {
        const auto s = energies(WellParameters::from_instanton(w, w, K, S, 1.0));
        worst_gap = std::max(worst_gap, rel(s.gap, 2.0 * K * std::exp(-S)));
      }
  return {worst <= 1e-5 && worst_gap <= 1e-14,
          "|delta|T = 1e-6, i <= 5, max rel diff to Beta value " + fmt(worst) +
              " (tol 1e-5); delta = 0 gap vs 2K e^-S " + fmt(worst_gap)};
}

Outcome decoupled_limit() {
  int exact = 0;
  int total = 0;
  const double omegas[] = {0.3, 1.0, 1.5, 2.0, 3.0, 7.25};
  for (double w0 : omegas)
    for (double w1 : omegas) {
      ++total;
      const auto s = energies(WellParameters::from_coupling(w0, w1, 0.0, 1.0));
      if (s.e_plus == std::min(w0, w1) / 2.0 && s.e_minus == std::max(w0, w1) / 2.0) ++exact;
    }
  return {exact == total, std::to_string(exact) + "/" + std::to_string(total) + " frequency pairs exact at B = 0"};
}

Outcome solver_validation() {
  const PotentialFunction harmonic = [](double x) { return 0.5 * x * x; };
  const auto grid = confining_grid(harmonic, 1.5);
  const auto e = lowest_eigenvalues(discretize(harmonic, grid), 2);
  const double err = std::max(std::abs(e[0] - 0.5), std::abs(e[1] - 1.5));
  const double ratio = richardson_ratio(harmonic, grid, 0);
  std::ostringstream detail;
  detail << "harmonic on [" << fmt(grid.x_min) << ", " << fmt(grid.x_max) << "] with " << grid.points
         << " points, level error " << fmt(err) << " (tol 1e-4), Richardson ratio " << fmt(ratio);
  return {err <= 1e-4 && ratio >= 3.5 && ratio <= 4.5, detail.str()};
}

Outcome scaling_law() {
  const std::vector<double> lambdas{2.0, 3.0, 4.0, 5.0, 6.0};
  bool pass = true;
  std::ostringstream detail;
  struct Case {
    double b;
    double lo;
    double hi;
  };
  for (const Case c : {Case{0.0, -1.15, -0.85}, Case{0.5, -1.2, -0.8}}) {
    detail << "b = " << c.b << ": ";
    try {
      const auto study = scaling_study(c.b, lambdas, std::nullopt, benchmark_grid());
      const bool ok = study.slope >= c.lo && study.slope <= c.hi;
      pass = pass && ok;
      detail << "slope " << fmt(study.slope) << " over " << study.records.size() << " points (want ["
             << c.lo << ", " << c.hi << "])";
    } catch (const Error& e) {
      pass = false;
      detail << e.code() << " (" << e.what() << ")";
    }
    if (c.b == 0.0) detail << "; ";
  }
  return {pass, detail.str()};
}

struct Criterion {
  const char* name;
  double budget_seconds;  // 0: no runtime requirement
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"three-way moment agreement", 30.0, three_way_agreement},
      {"exact closed-form coefficients", 10.0, exact_closed_form},
      {"column identities", 0.0, column_identities},
      {"series vs closed forms", 0.0, series_closed_forms},
      {"gas summation", 0.0, gas_summation},
      {"truncated Hamiltonian", 0.0, truncated_hamiltonian_match},
      {"symmetric limit", 0.0, symmetric_limit},
      {"decoupled limit", 0.0, decoupled_limit},
      {"solver validation", 20.0, solver_validation},
      {"scaling law", 120.0, scaling_law},
  };
  return list;
}

bool run_criterion(int index) {
  const auto& c = criteria()[static_cast<std::size_t>(index - 1)];
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string timing = fmt(seconds) + " s";
  if (c.budget_seconds > 0.0) {
    timing += " (budget " + fmt(c.budget_seconds) + " s)";
    if (seconds > c.budget_seconds) out.pass = false;
  }
  std::printf("[%s] AC%d %s: %s; %s\n", out.pass ? "PASS" : "FAIL", index, c.name,
              out.detail.c_str(), timing.c_str());
  std::fflush(stdout);
  return out.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(criteria().size());
  if (argc > 2) {
    std::fprintf(stderr, "usage: acceptance [criterion 1-%d]\n", count);
    return 2;
  }
  if (argc == 2) {
    const int index = std::atoi(argv[1]);
    if (index < 1 || index > count) {
      std::fprintf(stderr, "criterion must be in 1..%d\n", count);
      return 2;
    }
    return run_criterion(index) ? 0 : 1;
  }
  bool all = true;
  for (int i = 1; i <= count; ++i) all = run_criterion(i) && all;
  return all ? 0 : 1;
}
