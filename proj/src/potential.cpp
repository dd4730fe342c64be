#include <instanton_gas/error.hpp>
#include <instanton_gas/potential.hpp>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace instanton_gas {

namespace {

std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (int i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

}  // namespace

PolynomialPotential::PolynomialPotential(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  for (double c : coefficients_)
    if (!std::isfinite(c)) invalid_argument("coefficients", "non-finite coefficient");
  while (!coefficients_.empty() && coefficients_.back() == 0.0) coefficients_.pop_back();
  const int deg = degree();
  if (deg < 4 || deg % 2 != 0)
    invalid_argument("coefficients", "potential must have even degree >= 4");
  if (coefficients_.back() <= 0.0)
    invalid_argument("coefficients", "leading coefficient must be positive");
  first_ = differentiate(coefficients_);
  second_ = differentiate(first_);
}

PolynomialPotential PolynomialPotential::benchmark(double lambda, double b) {
  if (!(lambda > 0.0)) invalid_argument("lambda", "lambda must be positive");
  if (!(std::abs(b) < 2.0)) invalid_argument("b", "benchmark family requires |b| < 2");
  auto c = multiply({1.0, 0.0, -2.0, 0.0, 1.0}, {1.0, b, 1.0});
  for (double& x : c) x *= lambda;
  return PolynomialPotential(std::move(c));
}

double PolynomialPotential::evaluate(std::span<const double> c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double PolynomialPotential::scale() const {
  double s = 1.0;
  for (double c : coefficients_) s = std::max(s, std::abs(c));
  return s;
}

PolynomialPotential PolynomialPotential::scaled(double factor) const {
  if (!(factor > 0.0)) invalid_argument("factor", "scale factor must be positive");
  auto c = coefficients_;
  for (double& x : c) x *= factor;
  return PolynomialPotential(std::move(c));
}

PolynomialPotential PolynomialPotential::mirrored() const {
  auto c = coefficients_;
  for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
  return PolynomialPotential(std::move(c));
}

namespace detail {

double polish_stationary_point(const PolynomialPotential& potential, double start,
                               int max_iterations) {
  double x = start;
  for (int it = 0; it <= max_iterations; ++it) {
    const double slope = potential.first_derivative(x);
    const double curvature = potential.second_derivative(x);
    const double bound =
        1e-12 * std::max(potential.scale(), std::abs(curvature) * std::abs(x));
    if (std::abs(slope) <= bound) return x;
    if (it == max_iterations || curvature == 0.0) break;
    x -= slope / curvature;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "Newton polishing of V'(x) = 0 did not converge; last iterate x = " << x;
  throw Error("root_not_converged", msg.str());
}

}  // namespace detail

std::vector<WellMinimum> find_minima(const PolynomialPotential& potential) {
  auto roots = polynomial_roots(potential.derivative_coefficients());
  std::sort(roots.begin(), roots.end(),
            [](auto a, auto b) { return a.real() < b.real(); });

  // A k-fold root of V' comes back from the companion matrix as a ring of k
  // eigenvalues of radius ~eps^(1/k); their centroid is accurate to round-off.
  std::vector<std::vector<std::complex<double>>> clusters;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::complex<double>> group{roots[i]};
    used[i] = true;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (used[j]) continue;
        for (auto z : group) {
          if (std::abs(z - roots[j]) <= 1e-4 * std::max(1.0, std::abs(z))) {
            group.push_back(roots[j]);
            used[j] = true;
            grew = true;
            break;
          }
        }
      }
    }
    clusters.push_back(std::move(group));
  }

  const double curvature_tol = 1e-6 * potential.scale();
  std::vector<WellMinimum> minima;
  for (const auto& group : clusters) {
    std::complex<double> centroid{0.0, 0.0};
    for (auto z : group) centroid += z;
    centroid /= static_cast<double>(group.size());
    if (std::abs(centroid.imag()) > 1e-8 * std::max(1.0, std::abs(centroid))) continue;

    double x = centroid.real();
    if (group.size() == 1) x = detail::polish_stationary_point(potential, x);

    WellMinimum w;
    w.location = x;
    w.value = potential(x);
    w.curvature = potential.second_derivative(x);
    if (w.curvature > curvature_tol) {
      w.frequency = std::sqrt(w.curvature);
      w.harmonic = true;
    } else if (w.curvature < -curvature_tol) {
      continue;
    } else {
      const double d = 1e-3 * std::max(1.0, std::abs(x));
      if (!(potential(x - d) > w.value && potential(x + d) > w.value)) continue;
      w.curvature = std::max(w.curvature, 0.0);
      w.frequency = std::sqrt(w.curvature);
      w.harmonic = false;
    }
    if (!minima.empty() && std::abs(minima.back().location - x) < 1e-8) continue;
    minima.push_back(w);
  }

  if (std::none_of(minima.begin(), minima.end(), [](const auto& w) { return w.harmonic; }))
    throw Error("no_wells", "potential has no harmonic minimum");
  return minima;
}

namespace {

// Coefficients of p(a + s) in powers of s (repeated synthetic division).
std::vector<double> taylor_shift(std::span<const double> c, double a) {
  std::vector<double> out(c.begin(), c.end());
  const std::size_t n = out.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = n - 1; i > k; --i) out[i - 1] += a * out[i];
  return out;
}

}  // namespace

double instanton_action(const PolynomialPotential& potential, double x0, double x1) {
  if (!(x0 < x1)) invalid_argument("x0", "instanton_action requires x0 < x1");
  const double floor = std::min(potential(x0), potential(x1));
  const double tol = 1e-9 * potential.scale();

  constexpr int samples = 2000;
  for (int k = 1; k < samples; ++k) {
    const double x = x0 + (x1 - x0) * k / samples;
    if (potential(x) - floor < -tol) {
      std::ostringstream msg;
      msg << "potential dips below well floor at x = " << x;
      throw Error("below_floor", msg.str());
    }
  }

  auto integrand = [&](double x) { return std::sqrt(2.0 * std::max(potential(x) - floor, 0.0)); };
  using boost::math::quadrature::gauss_kronrod;
  constexpr double rel_tol = 1e-12;
  constexpr unsigned max_depth = 20;

  // Near each minimum substitute x = x_end +- u^2 so the integrand's linear
  // vanishing becomes quadratic in u. V - floor is taken from the polynomial
  // re-expanded about the endpoint; direct evaluation cancels there.
  const double edge = 1e-3 * (x1 - x0);
  const double u_max = std::sqrt(edge);
  auto edge_integrand = [&](double x_end, double sign) {
    const auto shifted = taylor_shift(potential.coefficients(), x_end);
    const double offset = shifted[0] - floor;
    const std::vector<double> tail(shifted.begin() + 1, shifted.end());
    return [=](double u) {
      const double s = sign * u * u;
      const double rise = offset + s * PolynomialPotential::evaluate(tail, s);
      return std::sqrt(2.0 * std::max(rise, 0.0)) * 2.0 * u;
    };
  };
  const double left = gauss_kronrod<double, 31>::integrate(edge_integrand(x0, 1.0), 0.0, u_max,
                                                           max_depth, rel_tol);
  const double right = gauss_kronrod<double, 31>::integrate(edge_integrand(x1, -1.0), 0.0, u_max,
                                                            max_depth, rel_tol);
  const double middle =
      gauss_kronrod<double, 31>::integrate(integrand, x0 + edge, x1 - edge, max_depth, rel_tol);
  return left + middle + right;
}

WellParameters well_parameters(const PolynomialPotential& potential, const WellMinimum& left,
                               const WellMinimum& right, std::optional<double> K, double T) {
  if (!left.harmonic || !right.harmonic)
    throw Error("non_harmonic", "both minima must have V'' > 0");
  if (std::abs(left.value - right.value) > 1e-9 * potential.scale())
    throw Error("asymmetric_depths", "asymmetric depths unsupported: minima differ in value");
  const double lo = std::min(left.location, right.location);
  const double hi = std::max(left.location, right.location);
  const double s = instanton_action(potential, lo, hi);
  return WellParameters::make(left.frequency, right.frequency, K, s, T);
}

// --- WellParameters ---------------------------------------------------------

namespace {
void check_frequencies(double omega0, double omega1, double T) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) invalid_argument("omega0", "omega0 must be > 0");
  if (!(omega1 > 0.0) || !std::isfinite(omega1)) invalid_argument("omega1", "omega1 must be > 0");
  if (!(T > 0.0) || !std::isfinite(T)) invalid_argument("T", "T must be > 0");
}
}  // namespace

WellParameters WellParameters::make(double omega0, double omega1, std::optional<double> K,
                                    std::optional<double> s_inst, double T) {
  check_frequencies(omega0, omega1, T);
  if (K && !(*K >= 0.0)) invalid_argument("K", "K must be >= 0");
  if (s_inst && !(*s_inst >= 0.0)) invalid_argument("S-inst", "S_inst must be >= 0");
  WellParameters p;
  p.omega0 = omega0;
  p.omega1 = omega1;
  p.delta = (omega0 - omega1) / 2.0;
  p.T = T;
  p.K = K;
  p.s_inst = s_inst;
  if (K && s_inst) p.B = *K * std::exp(-*s_inst);
  return p;
}

WellParameters WellParameters::from_coupling(double omega0, double omega1, double B, double T) {
  if (!(B >= 0.0) || !std::isfinite(B)) invalid_argument("B", "B must be >= 0");
  auto p = make(omega0, omega1, std::nullopt, std::nullopt, T);
  p.B = B;
  return p;
}

WellParameters WellParameters::from_instanton(double omega0, double omega1, double K,
                                              double s_inst, double T) {
  return make(omega0, omega1, K, s_inst, T);
}

double WellParameters::coupling() const {
  if (!B) throw Error("missing_parameter", "coupling B is not known (supply B or K and S_inst)", "B");
  return *B;
}

WellParameters WellParameters::with_T(double new_T) const {
  if (!(new_T > 0.0)) invalid_argument("T", "T must be > 0");
  auto p = *this;
  p.T = new_T;
  return p;
}

WellParameters WellParameters::with_coupling(double new_B) const {
  auto p = from_coupling(omega0, omega1, new_B, T);
  return p;
}

}  // namespace instanton_gas
