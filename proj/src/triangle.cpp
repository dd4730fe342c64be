#include <instanton_gas/error.hpp>
#include <instanton_gas/triangle.hpp>

#include <algorithm>
#include <climits>
#include <cmath>
#include <regex>
#include <sstream>

namespace instanton_gas {

// --- RPolynomial ------------------------------------------------------------

RPolynomial RPolynomial::monomial(Integer coefficient, int power) {
  RPolynomial p;
  if (coefficient != 0) p.terms_[power] = std::move(coefficient);
  return p;
}

Integer RPolynomial::coefficient(int power) const {
  auto it = terms_.find(power);
  return it == terms_.end() ? Integer(0) : it->second;
}

RPolynomial& RPolynomial::operator+=(const RPolynomial& other) {
  for (const auto& [power, c] : other.terms_) terms_[power] += c;
  prune();
  return *this;
}

RPolynomial& RPolynomial::operator-=(const RPolynomial& other) {
  for (const auto& [power, c] : other.terms_) terms_[power] -= c;
  prune();
  return *this;
}

RPolynomial RPolynomial::times_r() const {
  RPolynomial out;
  for (const auto& [power, c] : terms_) out.terms_[power + 1] = c;
  return out;
}

Rational RPolynomial::evaluate(const Rational& r) const {
  Rational sum = 0;
  for (const auto& [power, c] : terms_) {
    Rational term(c);
    for (int k = 0; k < power; ++k) term *= r;
    sum += term;
  }
  return sum;
}

void RPolynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
}

// --- triangle construction --------------------------------------------------

namespace {

using Expansion = std::map<std::pair<Branch, int>, RPolynomial>;

Expansion difference(const Expansion& a, const Expansion& b) {
  Expansion out = a;
  for (const auto& [key, poly] : b) out[key] -= poly;
  return out;
}

Expansion times_r(const Expansion& e) {
  Expansion out;
  for (const auto& [key, poly] : e) {
    auto shifted = poly.times_r();
    if (!shifted.empty()) out[key] = std::move(shifted);
  }
  return out;
}

std::vector<BasisCoefficient> to_coefficients(const Expansion& e, const Rational& ratio) {
  std::vector<BasisCoefficient> out;
  for (const auto& [key, poly] : e) {
    if (poly.empty()) continue;
    out.push_back({key.first, key.second, poly, poly.evaluate(ratio)});
  }
  return out;  // std::map order: plus before minus, j ascending
}

Integer binomial(int top, int bottom) {
  Integer out = 1;
  for (int k = 1; k <= bottom; ++k) {
    out *= top - bottom + k;
    out /= k;
  }
  return out;
}

void check_ratio(const Rational& ratio) {
  if (ratio == 0) invalid_argument("ratio", "ratio B/delta must be nonzero");
}

}  // namespace

CoefficientTriangle::CoefficientTriangle(int depth, Rational ratio)
    : depth_(depth), ratio_(std::move(ratio)) {
  if (depth < 0 || depth > kMaxDepth)
    invalid_argument("depth", "triangle depth must be in [0, 24]");
  check_ratio(ratio_);

  std::map<MomentKey, Expansion> built;
  for (int level = 0; level <= depth; ++level) {
    for (int n = level; n >= 0; --n) {
      const int m = level - n;
      Expansion e;
      if (n == 0 && m == 0) {
        e[{Branch::plus, 0}] = RPolynomial::monomial(1, 0);
        e[{Branch::minus, 0}] = RPolynomial::monomial(-1, 0);
        e = times_r(e);
      } else if (m == 0) {
        Expansion side;
        side[{Branch::plus, n}] = RPolynomial::monomial(1, 0);
        e = times_r(difference(side, built.at({n - 1, 0})));
      } else if (n == 0) {
        Expansion side;
        side[{Branch::minus, m}] = RPolynomial::monomial(1, 0);
        e = times_r(difference(built.at({0, m - 1}), side));
      } else {
        e = times_r(difference(built.at({n, m - 1}), built.at({n - 1, m})));
      }
      built[{n, m}] = e;
    }
  }
  for (const auto& [key, e] : built) entries_[key] = to_coefficients(e, ratio_);
}

const std::vector<BasisCoefficient>& CoefficientTriangle::entry(int n, int m) const {
  auto it = entries_.find({n, m});
  if (it == entries_.end()) invalid_argument("n", "entry outside triangle depth");
  return it->second;
}

double CoefficientTriangle::evaluate(int n, int m, double B, double delta, double T) const {
  const double bt = B * T;
  double sum = 0.0;
  for (const auto& c : entry(n, m)) {
    double basis = std::exp((c.branch == Branch::plus ? 0.5 : -0.5) * delta * T);
    for (int k = 1; k <= c.j; ++k) basis *= bt / k;
    sum += static_cast<double>(c.weight) * basis;
  }
  return sum;
}

CoefficientTriangle build_triangle(int depth, const Rational& ratio) {
  return CoefficientTriangle(depth, ratio);
}

std::vector<BasisCoefficient> closed_form_coefficients(MomentKey key, const Rational& ratio) {
  check_ratio(ratio);
  if (key.n < 0 || key.m < 0) invalid_argument("n", "indices must be non-negative");
  const int n = key.n;
  const int m = key.m;
  std::vector<BasisCoefficient> out;
  for (int i = 0; i <= n; ++i) {
    Integer c = binomial(m + n - i, m);
    if ((n - i) % 2 != 0) c = -c;
    auto poly = RPolynomial::monomial(c, n + m - i + 1);
    out.push_back({Branch::plus, i, poly, poly.evaluate(ratio)});
  }
  for (int j = 0; j <= m; ++j) {
    Integer c = binomial(m + n - j, n);
    if ((n + 1) % 2 != 0) c = -c;
    auto poly = RPolynomial::monomial(c, n + m - j + 1);
    out.push_back({Branch::minus, j, poly, poly.evaluate(ratio)});
  }
  return out;
}

// --- column sums ------------------------------------------------------------

TruncatedSeries ColumnCoefficients::get(Branch branch, int j) const {
  const auto& v = branch == Branch::plus ? plus : minus;
  if (j >= 0 && j < static_cast<int>(v.size())) return v[static_cast<std::size_t>(j)];
  // Same completeness bound as inside the stored range; nothing summed yet.
  const int anchor = branch == Branch::plus ? n : m;
  const int k_min = std::max(order + 1, j - anchor);
  return {RPolynomial{}, n + m + 2 * k_min - j + 1};
}

ColumnCoefficients column_coefficients(const CoefficientTriangle& triangle, int n, int m,
                                       int order) {
  if (n < 0 || m < 0 || order < 0) invalid_argument("order", "column indices must be >= 0");
  if (n + m + 2 * order > triangle.depth())
    invalid_argument("order", "column extends beyond triangle depth");
  ColumnCoefficients col;
  col.n = n;
  col.m = m;
  col.order = order;
  col.plus.resize(static_cast<std::size_t>(n + order + 1));
  col.minus.resize(static_cast<std::size_t>(m + order + 1));
  for (int k = 0; k <= order; ++k)
    for (const auto& c : triangle.entry(n + k, m + k)) {
      auto& target = c.branch == Branch::plus ? col.plus : col.minus;
      target[static_cast<std::size_t>(c.j)].poly += c.poly;
    }
  // Every path from a boundary source (j,0) or (0,j) to entry (N,M) has
  // N + M - j steps, each contributing one factor of r, so entry (N,M) adds to
  // S_j only at power N + M - j + 1. The first entry not yet summed that can
  // reach j bounds the complete powers.
  for (int j = 0; j < static_cast<int>(col.plus.size()); ++j) {
    const int k_min = std::max(order + 1, j - n);
    col.plus[static_cast<std::size_t>(j)].complete_below = n + m + 2 * k_min - j + 1;
  }
  for (int j = 0; j < static_cast<int>(col.minus.size()); ++j) {
    const int k_min = std::max(order + 1, j - m);
    col.minus[static_cast<std::size_t>(j)].complete_below = n + m + 2 * k_min - j + 1;
  }
  return col;
}

CentralSequence central_sequence(const CoefficientTriangle& triangle, int order) {
  if (order < 0) invalid_argument("order", "order must be >= 0");
  if (2 * order > triangle.depth()) {
    const int unstable = triangle.depth() / 2 + 1;
    std::ostringstream msg;
    msg << "central coefficient a_" << unstable << " is not determined at depth "
        << triangle.depth();
    throw Error("not_stabilized", msg.str(), "order");
  }
  CentralSequence seq;
  for (int i = 0; i <= order; ++i) {
    const auto col = column_coefficients(triangle, i, i, (triangle.depth() - 2 * i) / 2);
    seq.plus.push_back(col.get(Branch::plus, i));
    seq.minus.push_back(col.get(Branch::minus, i));
  }
  return seq;
}

// --- relation checks --------------------------------------------------------

namespace {

TruncatedSeries times_r(const TruncatedSeries& s) { return {s.poly.times_r(), s.complete_below + 1}; }

TruncatedSeries minus(const TruncatedSeries& a, const TruncatedSeries& b) {
  auto poly = a.poly;
  poly -= b.poly;
  return {poly, std::min(a.complete_below, b.complete_below)};
}

TruncatedSeries plus(const TruncatedSeries& a, const TruncatedSeries& b) {
  auto poly = a.poly;
  poly += b.poly;
  return {poly, std::min(a.complete_below, b.complete_below)};
}

/// Compares two series on their common complete range. A range with no
/// nonzero coefficient on either side is not counted.
void compare(RelationFamily& family, const TruncatedSeries& lhs, const TruncatedSeries& rhs) {
  const int limit = std::min(lhs.complete_below, rhs.complete_below);
  bool nontrivial = false;
  bool equal = true;
  for (const auto* s : {&lhs, &rhs})
    for (const auto& [power, c] : s->poly.terms())
      if (power < limit) {
        nontrivial = true;
        if (lhs.poly.coefficient(power) != rhs.poly.coefficient(power)) equal = false;
      }
  if (!nontrivial) return;
  ++family.checked;
  if (!equal) ++family.failures;
}

class ColumnCache {
 public:
  explicit ColumnCache(const CoefficientTriangle& t) : triangle_(t) {}
  bool has(int n, int m) const { return n >= 0 && m >= 0 && n + m <= triangle_.depth(); }
  const ColumnCoefficients& operator()(int n, int m) {
    auto it = cache_.find({n, m});
    if (it == cache_.end())
      it = cache_.emplace(MomentKey{n, m},
                          column_coefficients(triangle_, n, m, (triangle_.depth() - n - m) / 2))
               .first;
    return it->second;
  }

 private:
  const CoefficientTriangle& triangle_;
  std::map<MomentKey, ColumnCoefficients> cache_;
};

}  // namespace

long VerificationReport::total_failures() const {
  long total = central.failures;
  for (const auto& f : families) total += f.failures;
  return total;
}

VerificationReport verify_relations(const CoefficientTriangle& triangle) {
  const int depth = triangle.depth();
  ColumnCache col(triangle);
  VerificationReport report;
  report.depth = depth;
  report.ratio = triangle.ratio();

  RelationFamily recursion{"column recursion"};
  RelationFamily shift{"index shift"};
  RelationFamily off_diagonal{"off-diagonal transfer"};
  RelationFamily main_rule{"main rule"};
  constexpr Branch branches[] = {Branch::plus, Branch::minus};

  for (int n = 0; n <= depth; ++n) {
    for (int m = 0; n + m <= depth; ++m) {
      const auto& here = col(n, m);
      const int j_max = std::max(n, m) + here.order;

      // S_j(n,m) = r [S_j(n,m-1) - S_j(n-1,m)]
      if (n >= 1 && m >= 1) {
        for (Branch b : branches)
          for (int j = 0; j <= j_max; ++j)
            compare(recursion, here.get(b, j),
                    times_r(minus(col(n, m - 1).get(b, j), col(n - 1, m).get(b, j))));

        // Same identity with all three columns truncated at the same order
        // holds entry by entry, so the rational values at the ratio agree too.
        const int K = here.order;
        const auto left = column_coefficients(triangle, n, m - 1, K);
        const auto right = column_coefficients(triangle, n - 1, m, K);
        for (Branch b : branches)
          for (int j = 0; j <= j_max; ++j) {
            auto lhs = here.get(b, j).poly.evaluate(triangle.ratio());
            auto rhs = triangle.ratio() * (left.get(b, j).poly.evaluate(triangle.ratio()) -
                                           right.get(b, j).poly.evaluate(triangle.ratio()));
            ++recursion.checked;
            if (lhs != rhs) ++recursion.failures;
          }
      }

      for (int j = 0; j <= j_max; ++j) {
        // S_j^+(n,m) = S_{j+1}^+(n+1,m);  S_j^-(n,m) = S_{j+1}^-(n,m+1)
        if (col.has(n + 1, m))
          compare(shift, here.get(Branch::plus, j), col(n + 1, m).get(Branch::plus, j + 1));
        if (col.has(n, m + 1))
          compare(shift, here.get(Branch::minus, j), col(n, m + 1).get(Branch::minus, j + 1));

        // n < j: S_j^+(n,m) = S_j^+(j, m + j - n); mirrored for the minus branch.
        if (n < j && col.has(j, m + j - n))
          compare(off_diagonal, here.get(Branch::plus, j), col(j, m + j - n).get(Branch::plus, j));
        if (m < j && col.has(n + j - m, j))
          compare(off_diagonal, here.get(Branch::minus, j),
                  col(n + j - m, j).get(Branch::minus, j));
      }
    }
  }

  // S_i^+(i,m) = r [S_i^+(i,m-1) - S_i^+(i,m+1)] = r [S_{i-1}^+(i-1,m-1) - S_{i+1}^+(i+1,m+1)]
  for (int i = 1; i <= depth; ++i) {
    for (int m = 1; m <= depth; ++m) {
      if (!col.has(i + 1, m + 1)) continue;
      const auto lhs = col(i, m).get(Branch::plus, i);
      compare(main_rule, lhs,
              times_r(minus(col(i, m - 1).get(Branch::plus, i), col(i, m + 1).get(Branch::plus, i))));
      compare(main_rule, lhs,
              times_r(minus(col(i - 1, m - 1).get(Branch::plus, i - 1),
                            col(i + 1, m + 1).get(Branch::plus, i + 1))));
      // Mirror: S_i^-(m,i) = r [S_i^-(m+1,i) - S_i^-(m-1,i)]
      //                    = r [S_{i+1}^-(m+1,i+1) - S_{i-1}^-(m-1,i-1)]
      const auto mirror = col(m, i).get(Branch::minus, i);
      compare(main_rule, mirror,
              times_r(minus(col(m + 1, i).get(Branch::minus, i), col(m - 1, i).get(Branch::minus, i))));
      compare(main_rule, mirror,
              times_r(minus(col(m + 1, i + 1).get(Branch::minus, i + 1),
                            col(m - 1, i - 1).get(Branch::minus, i - 1))));
    }
  }

  report.families = {recursion, shift, off_diagonal, main_rule};

  // r a_{i+1} = r a_{i-1} - a_i (plus);  r a_{i+1} = r a_{i-1} + a_i (minus)
  RelationFamily central{"central recurrence"};
  const auto seq = central_sequence(triangle, depth / 2);
  for (std::size_t i = 1; i + 1 < seq.plus.size(); ++i) {
    compare(central, times_r(seq.plus[i + 1]),
            minus(times_r(seq.plus[i - 1]), seq.plus[i]));
    compare(central, times_r(seq.minus[i + 1]),
            plus(times_r(seq.minus[i - 1]), seq.minus[i]));
  }
  report.central = central;
  return report;
}

// --- a0 / a1 series ---------------------------------------------------------

SeriesSums series_a0_a1(double x, int terms) {
  if (terms < 1) invalid_argument("terms", "terms must be >= 1");
  const double x2 = x * x;
  double t0 = x;       // binom(2i,i) (-1)^i x^{2i+1}
  double t1 = x2;      // binom(2i-1,i-1) (-1)^{i-1} x^{2i}, starting at i = 1
  double a0 = 0.0;
  double a1 = 0.0;
  for (int i = 0; i < terms; ++i) {
    a0 += t0;
    a1 += t1;
    if (i + 1 < terms) {
      const double step = -x2 * 2.0 * (2.0 * i + 1.0) / (i + 1.0);
      const double step1 = -x2 * 2.0 * (2.0 * i + 3.0) / (i + 2.0);
      t0 *= step;
      t1 *= step1;
    }
  }
  const bool small_tail = std::abs(t0) <= 1e-14 * std::abs(a0) && std::abs(t1) <= 1e-14 * std::abs(a1);
  return {a0, a1, std::abs(x) < 0.5 && small_tail};
}

double a0_closed(double x) { return x / std::sqrt(1.0 + 4.0 * x * x); }

double a1_closed(double x) { return 0.5 - 0.5 / std::sqrt(1.0 + 4.0 * x * x); }

ExponentialPair central_exponentials(double x) {
  if (x == 0.0) invalid_argument("x", "B/delta must be nonzero");
  const double h = 1.0 / (2.0 * x);
  const double s = std::sqrt(h * h + 1.0);
  ExponentialPair e;
  e.alpha_plus = -h + s;
  e.alpha_minus = -h - s;
  const double a0 = a0_closed(x);
  const double a1 = a1_closed(x);
  e.c_plus = (a1 - a0 * e.alpha_minus) / (e.alpha_plus - e.alpha_minus);
  e.c_minus = (a0 * e.alpha_plus - a1) / (e.alpha_plus - e.alpha_minus);
  return e;
}

// --- ratio parsing ----------------------------------------------------------

Rational parse_ratio(const std::string& text) {
  static const std::regex pattern(R"(^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern))
    throw Error("exact_ratio_required", "ratio must be an exact fraction p/q, got '" + text + "'",
                "ratio");
  Integer p(match[1].str());
  Integer q = match[2].matched ? Integer(match[2].str()) : Integer(1);
  if (q == 0) throw Error("exact_ratio_required", "ratio denominator is zero", "ratio");
  return Rational(p, q);
}

std::string to_string(const Rational& r) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) out << '/' << boost::multiprecision::denominator(r);
  return out.str();
}

}  // namespace instanton_gas
