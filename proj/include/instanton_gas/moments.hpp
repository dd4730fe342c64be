#pragma once

#include <instanton_gas/potential.hpp>

#include <optional>
#include <string_view>
#include <vector>

namespace instanton_gas {

/// Largest n or m accepted by any moment evaluation.
inline constexpr int kMomentDepthCap = 64;

/// Index of the moment
///   I(n,m) = B^{n+m+1} e^{-(w0+w1)T/4} Int_{-T/2}^{T/2} e^{delta t}
///            (T/2+t)^n/n! (T/2-t)^m/m! dt.
struct MomentKey {
  int n = 0;
  int m = 0;
  auto operator<=>(const MomentKey&) const = default;
};

enum class MomentMethod { closed, recursive, quadrature, symmetric_limit };

std::string_view to_string(MomentMethod method);

/// `stripped` omits the common factor e^{-(w0+w1)T/4}; `full` includes it.
struct MomentValue {
  double stripped = 0.0;
  double full = 0.0;
  MomentMethod method = MomentMethod::quadrature;
};

/// e^{-(w0+w1)T/4}.
double moment_prefactor(const WellParameters& params);

struct QuadratureOptions {
  double relative_tolerance = 1e-12;
  unsigned max_depth = 20;
};

/// Direct adaptive Gauss-Kronrod integration; the reference for the other
/// evaluation routes. Requires B > 0.
MomentValue moment_quadrature(MomentKey key, const WellParameters& params,
                              QuadratureOptions options = {});

/// Rectangle of moments 0..max_n x 0..max_m filled by the integration-by-parts
/// recursion. Values are stored stripped; the prefactor is kept alongside.
class MomentTable {
 public:
  MomentTable(int max_n, int max_m, double prefactor, MomentMethod method,
              std::vector<double> stripped);

  int max_n() const { return max_n_; }
  int max_m() const { return max_m_; }
  MomentMethod method() const { return method_; }
  double prefactor() const { return prefactor_; }
  MomentValue at(int n, int m) const;

 private:
  int max_n_;
  int max_m_;
  double prefactor_;
  MomentMethod method_;
  std::vector<double> stripped_;
};

/// Working precision, in decimal digits, for the cancellation-prone routes.
/// Unset picks the narrowest of {16, 50, 100, 250} that covers the estimated
/// digit loss.
struct PrecisionOptions {
  std::optional<int> working_digits;
};

MomentTable moment_recursive(int max_n, int max_m, const WellParameters& params,
                             PrecisionOptions options = {});

/// Two-branch closed form (sums over the boundary terms of the triangle).
MomentValue moment_closed(MomentKey key, const WellParameters& params,
                          PrecisionOptions options = {});

/// delta = 0: the integral is a Beta function, stripped = (BT)^{n+m+1}/(n+m+1)!.
MomentValue moment_symmetric(MomentKey key, double B, double T, double omega);

/// Symmetric value times an exact Taylor series in delta*T (through fourth
/// order). Accurate for |delta T| well below 1.
MomentValue moment_small_asymmetry(MomentKey key, const WellParameters& params);

/// Full I(i,i): the contribution of i+1 instantons and i anti-instantons.
/// Dispatches on |delta| T: < 1e-4 small-asymmetry series, < 1e-1
/// quadrature, otherwise the closed form.
MomentValue multi_instanton(int i, const WellParameters& params);

/// Estimated decimal digits lost to cancellation in the closed form for `key`
/// (log10 of largest term over a lower bound of the result). Zero when
/// delta = 0.
double cancellation_digits(MomentKey key, const WellParameters& params);

}  // namespace instanton_gas
