#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <instanton_gas/error.hpp>
#include <instanton_gas/moments.hpp>

#include <cmath>
#include <random>

using namespace instanton_gas;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

// Reference values from 40-digit mpmath quadrature.
TEST_CASE("low moments at (w0, w1, B, T) = (1, 2, 0.3, 2)") {
  const auto p = WellParameters::from_coupling(1.0, 2.0, 0.3, 2.0);
  CHECK(moment_prefactor(p) == doctest::Approx(std::exp(-1.5)));

  const auto i00 = moment_quadrature({0, 0}, p);
  CHECK(rel(i00.stripped, 0.62531436659249683395) < 1e-12);
  CHECK(rel(i00.full, 0.13952649476089777782) < 1e-12);
  CHECK(i00.method == MomentMethod::quadrature);

  const auto i11 = moment_closed({1, 1}, p);
  CHECK(rel(i11.stripped, 0.036908073022558778776) < 1e-13);
  CHECK(rel(i11.full, 0.0082353042442934828827) < 1e-13);
  CHECK(i11.method == MomentMethod::closed);

  const auto table = moment_recursive(1, 1, p);
  CHECK(rel(table.at(0, 0).stripped, 0.62531436659249683395) < 1e-13);
  CHECK(rel(table.at(1, 0).stripped, 0.15683758245895006787) < 1e-13);
  CHECK(rel(table.at(1, 0).full, 0.034995194891358097611) < 1e-13);
  CHECK(rel(table.at(1, 1).full, 0.0082353042442934828827) < 1e-13);
  CHECK(table.at(1, 1).method == MomentMethod::recursive);
}

TEST_CASE("moment ladder at (w0, w1, B, T) = (1, 3, 0.5, 1)") {
  const auto p = WellParameters::from_coupling(1.0, 3.0, 0.5, 1.0);
  const double stripped[] = {0.52109530549374736162, 0.021358838554721515495,
                             0.00026509938063846842919, 1.5717510796254287488e-6};
  const double full[] = {0.19170024978210179734, 0.0078574775915820078995,
                         9.75246120041752421e-5, 5.782149088332138716e-7};
  for (int i = 0; i < 4; ++i) {
    CAPTURE(i);
    const auto v = moment_closed({i, i}, p);
    CHECK(rel(v.stripped, stripped[i]) < 1e-12);
    CHECK(rel(v.full, full[i]) < 1e-12);
    CHECK(rel(moment_quadrature({i, i}, p).full, full[i]) < 1e-11);
    CHECK(rel(multi_instanton(i, p).full, full[i]) < 1e-12);
  }
}

TEST_CASE("symmetric limit is a Beta function") {
  const auto v = moment_symmetric({2, 1}, 1.0, 2.0, 1.0);
  CHECK(v.stripped == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(rel(v.full, 0.24525296078096154773) < 1e-14);
  CHECK(v.method == MomentMethod::symmetric_limit);
  CHECK(to_string(v.method) == "symmetric-limit");

  const auto p = WellParameters::from_coupling(1.5, 1.5, 0.7, 3.0);
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= 6; ++m) {
      const double beta = std::pow(0.7 * 3.0, n + m + 1) / factorial(n + m + 1);
      CHECK(rel(moment_symmetric({n, m}, 0.7, 3.0, 1.5).stripped, beta) < 1e-14);
      CHECK(rel(moment_quadrature({n, m}, p).stripped, beta) < 1e-11);
    }
  CHECK_THROWS_AS(moment_recursive(2, 2, p), Error);
  CHECK_THROWS_AS(moment_closed({1, 1}, p), Error);
  CHECK(multi_instanton(3, p).method == MomentMethod::symmetric_limit);
}

TEST_CASE("closed form, recursion and quadrature agree") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> omega(0.5, 3.0);
  std::uniform_real_distribution<double> coupling(0.05, 1.5);
  std::uniform_real_distribution<double> time(0.5, 6.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double w0 = omega(rng);
    const double w1 = omega(rng);
    if (std::abs(w0 - w1) * 3.0 < 0.2) continue;
    const auto p = WellParameters::from_coupling(w0, w1, coupling(rng), time(rng));
    const auto table = moment_recursive(6, 6, p);
    for (int n = 0; n <= 6; n += 2)
      for (int m = 0; m <= 6; m += 3) {
        CAPTURE(w0);
        CAPTURE(w1);
        const double q = moment_quadrature({n, m}, p).stripped;
        CHECK(rel(moment_closed({n, m}, p).stripped, q) < 1e-10);
        CHECK(rel(table.at(n, m).stripped, q) < 1e-10);
      }
  }
}

TEST_CASE("reflection swaps the indices") {
  const auto p = WellParameters::from_coupling(1.0, 2.5, 0.4, 3.0);
  const auto q = WellParameters::from_coupling(2.5, 1.0, 0.4, 3.0);
  for (int n = 0; n <= 5; ++n)
    for (int m = 0; m <= 5; ++m) {
      CHECK(rel(moment_closed({n, m}, p).stripped, moment_closed({m, n}, q).stripped) < 1e-12);
      CHECK(rel(moment_quadrature({n, m}, p).full, moment_quadrature({m, n}, q).full) < 1e-11);
    }
}

TEST_CASE("stripped moments scale as B^(n+m+1)") {
  const auto p = WellParameters::from_coupling(1.0, 2.0, 0.3, 2.0);
  for (double s : {0.1, 2.0, 7.5})
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) {
        const double base = moment_closed({n, m}, p).stripped;
        const double scaled = moment_closed({n, m}, p.with_coupling(0.3 * s)).stripped;
        CHECK(rel(scaled, base * std::pow(s, n + m + 1)) < 1e-12);
      }
}

TEST_CASE("integration by parts holds on quadrature values") {
  // delta I(n,m) = B (I(n,m-1) - I(n-1,m)) for n, m >= 1
  const auto p = WellParameters::from_coupling(0.8, 2.2, 0.6, 2.5);
  for (int n = 1; n <= 5; ++n)
    for (int m = 1; m <= 5; ++m) {
      const double lhs = p.delta * moment_quadrature({n, m}, p).stripped;
      const double rhs = 0.6 * (moment_quadrature({n, m - 1}, p).stripped -
                                moment_quadrature({n - 1, m}, p).stripped);
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(std::abs(lhs), std::abs(rhs)) + 1e-15);
    }
}

TEST_CASE("small asymmetry series matches quadrature") {
  for (double dT : {1e-7, 1e-6, 1e-5, 5e-5}) {
    const double T = 2.0;
    const double w0 = 1.0;
    const auto p = WellParameters::from_coupling(w0, w0 - 2.0 * dT / T, 0.5, T);
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) {
        CAPTURE(dT);
        const auto s = moment_small_asymmetry({n, m}, p);
        CHECK(rel(s.stripped, moment_quadrature({n, m}, p).stripped) < 1e-12);
      }
    CHECK(multi_instanton(2, p).method == MomentMethod::symmetric_limit);
  }
}

TEST_CASE("multi_instanton dispatch") {
  const auto mid = WellParameters::from_coupling(1.0, 1.02, 0.5, 2.0);  // |delta| T = 0.02
  CHECK(multi_instanton(2, mid).method == MomentMethod::quadrature);
  const auto wide = WellParameters::from_coupling(1.0, 2.0, 0.5, 2.0);
  CHECK(multi_instanton(2, wide).method == MomentMethod::closed);
  CHECK(multi_instanton(2, wide.with_coupling(0.0)).full == 0.0);
}

TEST_CASE("M_i decays at least like (BT)^(2i+1)/(2i+1)!") {
  const auto p = WellParameters::from_coupling(1.0, 3.0, 0.8, 4.0);
  for (int i = 0; i <= 12; ++i) {
    const double bound =
        std::exp(std::abs(p.delta) * p.T / 2.0) * std::pow(0.8 * 4.0, 2 * i + 1) / factorial(2 * i + 1);
    CHECK(multi_instanton(i, p).stripped <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("adaptive precision handles cancellation") {
  const auto p = WellParameters::from_coupling(1.0, 1.1, 1.0, 5.0);  // |delta| T = 0.25
  CHECK(cancellation_digits({20, 20}, p) > 8.0);
  CHECK(cancellation_digits({0, 0}, WellParameters::from_coupling(1.0, 1.0, 1.0, 5.0)) == 0.0);
  try {
    moment_closed({20, 20}, p, PrecisionOptions{16});
    FAIL("expected cancellation error");
  } catch (const Error& e) {
    CHECK(e.code() == "cancellation");
  }
  const double q = moment_quadrature({20, 20}, p).stripped;
  CHECK(rel(moment_closed({20, 20}, p).stripped, q) < 1e-10);
  CHECK(rel(moment_closed({20, 20}, p, PrecisionOptions{100}).stripped, q) < 1e-10);
  CHECK(rel(moment_recursive(20, 20, p).at(20, 20).stripped, q) < 1e-10);
  CHECK_THROWS_AS(moment_closed({1, 1}, p, PrecisionOptions{30}), Error);
}

TEST_CASE("argument validation") {
  const auto p = WellParameters::from_coupling(1.0, 2.0, 0.3, 2.0);
  CHECK_THROWS_AS(moment_closed({-1, 0}, p), Error);
  CHECK_THROWS_AS(moment_closed({kMomentDepthCap + 1, 0}, p), Error);
  CHECK_THROWS_AS(moment_recursive(kMomentDepthCap + 1, 0, p), Error);
  CHECK_THROWS_AS(moment_quadrature({0, 0}, p.with_coupling(0.0)), Error);
  CHECK(moment_closed({3, 2}, p.with_coupling(0.0)).full == 0.0);
  CHECK_THROWS_AS(moment_closed({0, 0}, WellParameters::make(1.0, 2.0, {}, {}, 1.0)), Error);
}
