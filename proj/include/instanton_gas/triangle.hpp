#pragma once

#include <instanton_gas/moments.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <vector>

namespace instanton_gas {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact integer polynomial in r = B/delta, stored sparsely by power.
class RPolynomial {
 public:
  RPolynomial() = default;
  static RPolynomial monomial(Integer coefficient, int power);

  const std::map<int, Integer>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  Integer coefficient(int power) const;

  RPolynomial& operator+=(const RPolynomial& other);
  RPolynomial& operator-=(const RPolynomial& other);
  /// Multiplication by r: every power shifts up by one.
  RPolynomial times_r() const;
  Rational evaluate(const Rational& r) const;

  bool operator==(const RPolynomial&) const = default;

 private:
  void prune();
  std::map<int, Integer> terms_;
};

/// Which exponential e^{+-delta T/2} a basis term multiplies.
enum class Branch { plus, minus };

/// Coefficient of e^{+-delta T/2} (BT)^j / j! in a stripped moment.
/// `poly` is the coefficient as a polynomial in r; `weight` is its exact value
/// at the triangle's ratio.
struct BasisCoefficient {
  Branch branch = Branch::plus;
  int j = 0;
  RPolynomial poly;
  Rational weight;

  bool operator==(const BasisCoefficient&) const = default;
};

/// Every moment with n + m <= depth expanded over the basis, built by the
/// boundary and interior recursion rules. Entries are sorted: plus branch by
/// ascending j, then minus branch by ascending j.
class CoefficientTriangle {
 public:
  static constexpr int kMaxDepth = 24;

  CoefficientTriangle(int depth, Rational ratio);

  int depth() const { return depth_; }
  const Rational& ratio() const { return ratio_; }
  const std::vector<BasisCoefficient>& entry(int n, int m) const;
  const std::map<MomentKey, std::vector<BasisCoefficient>>& entries() const { return entries_; }

  /// Evaluates entry (n,m) in floating point at the given physical values.
  /// The triangle's exact ratio is used for r; B and T fix BT and delta*T.
  double evaluate(int n, int m, double B, double delta, double T) const;

 private:
  int depth_;
  Rational ratio_;
  std::map<MomentKey, std::vector<BasisCoefficient>> entries_;
};

CoefficientTriangle build_triangle(int depth, const Rational& ratio);

/// Basis coefficients of I(n,m) read off the two-branch closed form.
std::vector<BasisCoefficient> closed_form_coefficients(MomentKey key, const Rational& ratio);

/// Truncated power series in r. Powers below `complete_below` carry their
/// final value; higher powers are partial sums.
struct TruncatedSeries {
  RPolynomial poly;
  int complete_below = 0;
};

/// Coefficients S_j^{+-}(n,m) of the column sum S(n,m) = sum_i I(n+i, m+i),
/// truncated after `order` + 1 entries. plus[j] and minus[j] are indexed by j.
struct ColumnCoefficients {
  int n = 0;
  int m = 0;
  int order = 0;
  std::vector<TruncatedSeries> plus;
  std::vector<TruncatedSeries> minus;

  /// Coefficient S_j, or an empty series complete through every power when
  /// j is outside the stored range (no entry contributes there).
  TruncatedSeries get(Branch branch, int j) const;
};

ColumnCoefficients column_coefficients(const CoefficientTriangle& triangle, int n, int m,
                                       int order);

/// a_i^{+-} = S_i^{+-}(i,i) for i = 0..order.
struct CentralSequence {
  std::vector<TruncatedSeries> plus;
  std::vector<TruncatedSeries> minus;
};

CentralSequence central_sequence(const CoefficientTriangle& triangle, int order);

struct RelationFamily {
  std::string name;
  long checked = 0;
  long failures = 0;
};

struct VerificationReport {
  int depth = 0;
  Rational ratio;
  std::vector<RelationFamily> families;  // column relations
  RelationFamily central;                // a_{i+1} = a_{i-1} -+ (delta/B) a_i
  long total_failures() const;
};

/// Checks the column-sum relations (recursion, shift, off-diagonal, main
/// rule; both branches where they apply) and the central recurrence on every
/// coefficient the triangle determines completely.
VerificationReport verify_relations(const CoefficientTriangle& triangle);

/// Partial sums of the binomial series for a0 and a1 at x = B/delta.
struct SeriesSums {
  double a0 = 0.0;
  double a1 = 0.0;
  bool converged = false;
};

SeriesSums series_a0_a1(double x, int terms);

/// Closed forms of the series: a0 = x / sqrt(1 + 4x^2),
/// a1 = 1/2 - 1 / (2 sqrt(1 + 4x^2)).
double a0_closed(double x);
double a1_closed(double x);

/// a_i^+ as C_+ alpha_+^i + C_- alpha_-^i with alpha_+- = -1/(2x) +- sqrt(1/(4x^2) + 1).
/// For x > 0, C_- = 0 and C_+ = 1/(2 sqrt(1 + (1/(2x))^2)); for x < 0 the roles swap.
struct ExponentialPair {
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
};

ExponentialPair central_exponentials(double x);

/// Parses "p/q" (or an integer "p") into an exact rational. Decimal input is
/// rejected.
Rational parse_ratio(const std::string& text);
std::string to_string(const Rational& r);

}  // namespace instanton_gas
