#pragma once

#include <optional>
#include <span>
#include <vector>

namespace instanton_gas {

/// Real polynomial V(x) = sum_k c_k x^k in units hbar = m = 1.
///
/// The coefficient list is stored in ascending power order. Construction
/// enforces a confining shape: even degree >= 4 with a positive leading
/// coefficient (trailing zeros are trimmed first).
class PolynomialPotential {
 public:
  explicit PolynomialPotential(std::vector<double> coefficients);

  /// lambda (x^2 - 1)^2 (x^2 + b x + 1): degenerate minima at x = -1, +1
  /// with curvatures 8 lambda (2 - b) and 8 lambda (2 + b). Requires |b| < 2.
  static PolynomialPotential benchmark(double lambda, double b);

  double operator()(double x) const { return evaluate(coefficients_, x); }
  double first_derivative(double x) const { return evaluate(first_, x); }
  double second_derivative(double x) const { return evaluate(second_, x); }

  std::span<const double> coefficients() const { return coefficients_; }
  std::span<const double> derivative_coefficients() const { return first_; }
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }

  /// Largest coefficient magnitude, at least 1. Sets the absolute scale of
  /// value and root tolerances.
  double scale() const;

  PolynomialPotential scaled(double factor) const;
  /// V(-x).
  PolynomialPotential mirrored() const;

  static double evaluate(std::span<const double> coefficients, double x);

 private:
  std::vector<double> coefficients_;
  std::vector<double> first_;
  std::vector<double> second_;
};

struct WellMinimum {
  double location = 0.0;
  double value = 0.0;
  double curvature = 0.0;  // V'' at the minimum
  double frequency = 0.0;  // sqrt(curvature)
  bool harmonic = true;    // false when V'' vanishes (quartic or flatter bottom)
};

/// Reduced parameter set shared by the moments, triangle and spectrum code.
///
/// delta = (omega0 - omega1) / 2 and keeps its sign. The coupling B is either
/// given directly or derived as K exp(-S_inst); when neither is known it is
/// absent and `coupling()` throws.
struct WellParameters {
  double omega0 = 1.0;
  double omega1 = 1.0;
  double delta = 0.0;
  double T = 1.0;
  std::optional<double> B;
  std::optional<double> K;
  std::optional<double> s_inst;

  static WellParameters from_coupling(double omega0, double omega1, double B, double T);
  static WellParameters from_instanton(double omega0, double omega1, double K, double s_inst,
                                       double T);
  /// Frequencies only; B stays absent unless K and S_inst are both given.
  static WellParameters make(double omega0, double omega1, std::optional<double> K,
                             std::optional<double> s_inst, double T);

  double coupling() const;
  WellParameters with_T(double new_T) const;
  WellParameters with_coupling(double new_B) const;
};

std::vector<WellMinimum> find_minima(const PolynomialPotential& potential);

double instanton_action(const PolynomialPotential& potential, double x0, double x1);

WellParameters well_parameters(const PolynomialPotential& potential, const WellMinimum& left,
                               const WellMinimum& right, std::optional<double> K, double T);

namespace detail {
/// Newton iteration on V'(x) = 0. Throws "root_not_converged" carrying the
/// last iterate when the residual bound is not met within `max_iterations`.
double polish_stationary_point(const PolynomialPotential& potential, double start,
                               int max_iterations = 100);
}  // namespace detail

}  // namespace instanton_gas
