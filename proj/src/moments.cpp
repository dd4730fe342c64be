#include <instanton_gas/error.hpp>
#include <instanton_gas/moments.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace instanton_gas {

namespace mp = boost::multiprecision;

namespace {

using Float50 = mp::number<mp::cpp_bin_float<50>, mp::et_off>;
using Float100 = mp::number<mp::cpp_bin_float<100>, mp::et_off>;
using Float250 = mp::number<mp::cpp_bin_float<250>, mp::et_off>;

constexpr double kLn10 = 2.302585092994045684;

void check_key(MomentKey key) {
  if (key.n < 0 || key.m < 0) invalid_argument("n", "moment indices must be non-negative");
  if (key.n > kMomentDepthCap || key.m > kMomentDepthCap)
    invalid_argument("n", "moment index exceeds depth cap of 64");
}

mp::cpp_int binomial(int top, int bottom) {
  mp::cpp_int out = 1;
  for (int k = 1; k <= bottom; ++k) {
    out *= top - bottom + k;
    out /= k;
  }
  return out;
}

double log10_binomial(int top, int bottom) {
  return (std::lgamma(top + 1.0) - std::lgamma(bottom + 1.0) - std::lgamma(top - bottom + 1.0)) /
         kLn10;
}

/// Neumaier-compensated running sum.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& x) {
    const Real t = sum_ + x;
    if (abs(sum_) >= abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  Real value() const { return sum_ + carry_; }

 private:
  static Real abs(const Real& x) { return x < 0 ? Real(-x) : x; }
  Real sum_ = 0;
  Real carry_ = 0;
};

/// Working tier in decimal digits for a given estimated loss.
int choose_digits(double loss, std::optional<int> forced) {
  if (forced) {
    const int d = *forced;
    if (d != 16 && d != 50 && d != 100 && d != 250)
      invalid_argument("working_digits", "working precision must be one of 16, 50, 100, 250");
    return d;
  }
  if (loss <= 2.0) return 16;
  const double needed = loss + 20.0;
  for (int d : {50, 100, 250})
    if (needed <= d) return d;
  std::ostringstream msg;
  msg << "closed form/recursion would lose ~" << static_cast<int>(loss)
      << " digits to cancellation (|delta| T too small); use the symmetric-limit or "
         "quadrature path";
  throw Error("cancellation", msg.str(), "delta");
}

[[noreturn]] void throw_cancellation(int digits) {
  std::ostringstream msg;
  msg << "catastrophic cancellation in closed form at " << digits
      << " working digits; use the recursive/quadrature path or extended precision";
  throw Error("cancellation", msg.str(), "delta");
}

template <class Real>
struct ClosedResult {
  Real stripped;
  Real full;
};

template <class Real>
ClosedResult<Real> closed_form(MomentKey key, const WellParameters& p, int digits) {
  const int n = key.n;
  const int m = key.m;
  const Real B = p.coupling();
  const Real delta = p.delta;
  const Real T = p.T;
  const Real r = B / delta;
  const Real bt = B * T;
  using std::exp;
  using mp::exp;
  const Real e_plus = exp(delta * T / 2);
  const Real e_minus = exp(-delta * T / 2);
  // Taken from omega0 + omega1 rather than folded into e^{-+omega T/2}: delta is
  // rounded, and the branches cancel, so both must see the same delta.
  const Real prefactor = exp(-(Real(p.omega0) + Real(p.omega1)) * T / 4);

  CompensatedSum<Real> stripped;
  Real largest = 0;

  // (BT)^i / i! built incrementally; r^p by repeated multiplication.
  Real power_term = 1;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) power_term = power_term * bt / i;
    Real w = Real(binomial(m + n - i, m)) * power_term;
    for (int k = 0; k < n + m - i + 1; ++k) w *= r;
    if ((n - i) % 2 != 0) w = -w;
    const Real t = w * e_plus;
    stripped.add(t);
    largest = std::max(largest, Real(t < 0 ? Real(-t) : t));
  }
  power_term = 1;
  for (int j = 0; j <= m; ++j) {
    if (j > 0) power_term = power_term * bt / j;
    Real w = Real(binomial(m + n - j, n)) * power_term;
    for (int k = 0; k < n + m - j + 1; ++k) w *= r;
    if ((n + 1) % 2 != 0) w = -w;
    const Real t = w * e_minus;
    stripped.add(t);
    largest = std::max(largest, Real(t < 0 ? Real(-t) : t));
  }

  const Real value = stripped.value();
  const Real magnitude = value < 0 ? Real(-value) : value;
  if (largest > 0 && magnitude < largest * Real(std::pow(10.0, -(digits - 6))))
    throw_cancellation(digits);
  return {value, prefactor * value};
}

template <class Real>
std::vector<double> recursion_table(int max_n, int max_m, const WellParameters& p) {
  const Real B = p.coupling();
  const Real delta = p.delta;
  const Real T = p.T;
  const Real r = B / delta;
  const Real bt = B * T;
  using std::exp;
  using mp::exp;
  const Real e_plus = exp(delta * T / 2);
  const Real e_minus = exp(-delta * T / 2);

  const int cols = max_m + 1;
  std::vector<Real> I(static_cast<std::size_t>((max_n + 1) * cols));
  auto at = [&](int n, int m) -> Real& { return I[static_cast<std::size_t>(n * cols + m)]; };

  at(0, 0) = r * (e_plus - e_minus);
  Real side = 1;
  for (int n = 1; n <= max_n; ++n) {
    side = side * bt / n;
    at(n, 0) = r * (e_plus * side - at(n - 1, 0));
  }
  side = 1;
  for (int m = 1; m <= max_m; ++m) {
    side = side * bt / m;
    at(0, m) = r * (at(0, m - 1) - e_minus * side);
  }
  for (int n = 1; n <= max_n; ++n)
    for (int m = 1; m <= max_m; ++m) at(n, m) = r * (at(n, m - 1) - at(n - 1, m));

  std::vector<double> out;
  out.reserve(I.size());
  for (const auto& v : I) out.push_back(static_cast<double>(v));
  return out;
}

void require_positive_coupling(const WellParameters& p) {
  if (!(p.coupling() > 0.0)) invalid_argument("B", "this evaluation requires B > 0");
}

}  // namespace

std::string_view to_string(MomentMethod method) {
  switch (method) {
    case MomentMethod::closed: return "closed";
    case MomentMethod::recursive: return "recursive";
    case MomentMethod::quadrature: return "quadrature";
    case MomentMethod::symmetric_limit: return "symmetric-limit";
  }
  return "unknown";
}

double moment_prefactor(const WellParameters& params) {
  return std::exp(-(params.omega0 + params.omega1) * params.T / 4.0);
}

MomentValue moment_quadrature(MomentKey key, const WellParameters& params,
                              QuadratureOptions options) {
  check_key(key);
  require_positive_coupling(params);
  const double half = params.T / 2.0;
  const double log_norm = std::lgamma(key.n + 1.0) + std::lgamma(key.m + 1.0);
  auto integrand = [&](double t) {
    const double a = half + t;
    const double b = half - t;
    if (a <= 0.0 && key.n > 0) return 0.0;
    if (b <= 0.0 && key.m > 0) return 0.0;
    const double log_poly = (key.n > 0 ? key.n * std::log(a) : 0.0) +
                            (key.m > 0 ? key.m * std::log(b) : 0.0) - log_norm;
    return std::exp(params.delta * t + log_poly);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -half, half, options.max_depth, options.relative_tolerance, &error, &l1);
  if (!(error <= options.relative_tolerance * std::abs(integral))) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "quadrature did not reach relative tolerance " << options.relative_tolerance
        << "; achieved error estimate " << error / std::abs(integral);
    throw Error("quadrature_not_converged", msg.str());
  }
  const double stripped = std::pow(params.coupling(), key.n + key.m + 1) * integral;
  return {stripped, stripped * moment_prefactor(params), MomentMethod::quadrature};
}

MomentTable::MomentTable(int max_n, int max_m, double prefactor, MomentMethod method,
                         std::vector<double> stripped)
    : max_n_(max_n), max_m_(max_m), prefactor_(prefactor), method_(method),
      stripped_(std::move(stripped)) {
  if (stripped_.size() != static_cast<std::size_t>((max_n + 1) * (max_m + 1)))
    invalid_argument("stripped", "table size does not match its dimensions");
}

MomentValue MomentTable::at(int n, int m) const {
  if (n < 0 || m < 0 || n > max_n_ || m > max_m_) invalid_argument("n", "index outside table");
  const double s = stripped_[static_cast<std::size_t>(n * (max_m_ + 1) + m)];
  return {s, s * prefactor_, method_};
}

double cancellation_digits(MomentKey key, const WellParameters& params) {
  check_key(key);
  const double B = params.coupling();
  if (params.delta == 0.0 || B == 0.0) return 0.0;
  const int n = key.n;
  const int m = key.m;
  const double log_r = std::log10(std::abs(B / params.delta));
  const double log_bt = std::log10(B * params.T);
  const double shift = std::abs(params.delta) * params.T / 2.0 / kLn10;
  double largest = -1e300;
  for (int i = 0; i <= n; ++i)
    largest = std::max(largest, log10_binomial(m + n - i, m) + (n + m - i + 1) * log_r +
                                    i * log_bt - std::lgamma(i + 1.0) / kLn10 + shift);
  for (int j = 0; j <= m; ++j)
    largest = std::max(largest, log10_binomial(m + n - j, n) + (n + m - j + 1) * log_r +
                                    j * log_bt - std::lgamma(j + 1.0) / kLn10 + shift);
  // Lower bound of the stripped value: Beta integral times min of e^{delta t}.
  const int k = n + m + 1;
  const double lower = k * log_bt - std::lgamma(k + 1.0) / kLn10 - shift;
  return std::max(0.0, largest - lower);
}

MomentTable moment_recursive(int max_n, int max_m, const WellParameters& params,
                             PrecisionOptions options) {
  check_key({max_n, max_m});
  if (params.delta == 0.0 || std::abs(params.delta) * params.T < 1e-12)
    throw Error("small_delta",
                "recursion divides by delta; use moment_symmetric for the symmetric limit",
                "delta");
  const double B = params.coupling();
  double loss = 0.0;
  if (B > 0.0)
    for (int n = 0; n <= max_n; ++n)
      for (int m = 0; m <= max_m; ++m)
        loss = std::max(loss, cancellation_digits({n, m}, params));
  int digits = 0;
  try {
    // Errors along the recursion grow like the closed-form coefficients plus
    // a path-count factor; the extra margin covers the latter.
    digits = choose_digits(loss > 2.0 ? loss + 10.0 : loss, options.working_digits);
  } catch (const Error& e) {
    throw Error("small_delta", std::string(e.what()), "delta");
  }

  std::vector<double> stripped;
  switch (digits) {
    case 16: stripped = recursion_table<double>(max_n, max_m, params); break;
    case 50: stripped = recursion_table<Float50>(max_n, max_m, params); break;
    case 100: stripped = recursion_table<Float100>(max_n, max_m, params); break;
    default: stripped = recursion_table<Float250>(max_n, max_m, params); break;
  }
  return MomentTable(max_n, max_m, moment_prefactor(params), MomentMethod::recursive,
                     std::move(stripped));
}

MomentValue moment_closed(MomentKey key, const WellParameters& params,
                          PrecisionOptions options) {
  check_key(key);
  if (params.delta == 0.0)
    throw Error("small_delta", "closed form divides by delta; use moment_symmetric", "delta");
  if (params.coupling() == 0.0) return {0.0, 0.0, MomentMethod::closed};
  const int digits = choose_digits(cancellation_digits(key, params), options.working_digits);
  auto convert = [](const auto& r) {
    return MomentValue{static_cast<double>(r.stripped), static_cast<double>(r.full),
                       MomentMethod::closed};
  };
  switch (digits) {
    case 16: return convert(closed_form<double>(key, params, digits));
    case 50: return convert(closed_form<Float50>(key, params, digits));
    case 100: return convert(closed_form<Float100>(key, params, digits));
    default: return convert(closed_form<Float250>(key, params, digits));
  }
}

MomentValue moment_symmetric(MomentKey key, double B, double T, double omega) {
  check_key(key);
  if (!(B >= 0.0)) invalid_argument("B", "B must be >= 0");
  if (!(T > 0.0)) invalid_argument("T", "T must be > 0");
  if (!(omega > 0.0)) invalid_argument("omega", "omega must be > 0");
  const int k = key.n + key.m + 1;
  double stripped = 1.0;
  for (int j = 1; j <= k; ++j) stripped *= B * T / j;
  return {stripped, stripped * std::exp(-omega * T / 2.0), MomentMethod::symmetric_limit};
}

MomentValue moment_small_asymmetry(MomentKey key, const WellParameters& params) {
  check_key(key);
  const double B = params.coupling();
  const int n = key.n;
  const int m = key.m;
  const double x = params.delta * params.T;

  // Taylor coefficient k of the integral in delta*T, relative to the Beta value:
  // (n+m+1)! Int_0^1 (s - 1/2)^k s^n (1-s)^m ds / (n! m!).
  using Rational = mp::cpp_rational;
  constexpr int order = 4;
  double series = 0.0;
  double x_power = 1.0;
  mp::cpp_int k_factorial = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) {
      x_power *= x;
      k_factorial *= k;
    }
    Rational mu = 0;
    for (int l = 0; l <= k; ++l) {
      // (n+l)! (n+m+1)! / (n! (n+m+l+1)!)
      Rational ratio = 1;
      for (int q = 1; q <= l; ++q) ratio *= Rational(n + q, n + m + 1 + q);
      Rational half_power = 1;
      for (int q = 0; q < k - l; ++q) half_power *= Rational(-1, 2);
      mu += Rational(binomial(k, l)) * half_power * ratio;
    }
    series += static_cast<double>(mu / Rational(k_factorial)) * x_power;
  }

  const MomentValue base = moment_symmetric(key, B, params.T, params.omega0);
  const double stripped = base.stripped * series;
  return {stripped, stripped * moment_prefactor(params), MomentMethod::symmetric_limit};
}

MomentValue multi_instanton(int i, const WellParameters& params) {
  if (i < 0) invalid_argument("i", "instanton index must be >= 0");
  const MomentKey key{i, i};
  check_key(key);
  if (params.coupling() == 0.0) return {0.0, 0.0, MomentMethod::closed};
  const double x = std::abs(params.delta) * params.T;
  if (params.delta == 0.0) return moment_symmetric(key, *params.B, params.T, params.omega0);
  if (x < 1e-4) return moment_small_asymmetry(key, params);
  if (x < 1e-1) return moment_quadrature(key, params);
  return moment_closed(key, params);
}

}  // namespace instanton_gas
