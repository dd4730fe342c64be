#include <instanton_gas/error.hpp>
#include <instanton_gas/moments.hpp>
#include <instanton_gas/spectrum.hpp>

#include <algorithm>
#include <cmath>

namespace instanton_gas {

namespace {

double amplitude_coefficient(double delta, double B) {
  if (B == 0.0) return delta == 0.0 ? 0.5 : 0.0;
  const double q = delta / (2.0 * B);
  return 0.5 / std::sqrt(1.0 + q * q);
}

SpectrumResult doublet(double omega0, double omega1, double coupling) {
  SpectrumResult s;
  if (coupling == 0.0) {
    s.e_plus = std::min(omega0, omega1) / 2.0;
    s.e_minus = std::max(omega0, omega1) / 2.0;
  } else {
    const double mean = (omega0 + omega1) / 4.0;
    const double radius = std::hypot((omega0 - omega1) / 4.0, coupling);
    s.e_plus = mean - radius;
    s.e_minus = mean + radius;
  }
  // Twice the radius keeps full relative accuracy when the doublet is narrow.
  s.gap = coupling == 0.0 ? s.e_minus - s.e_plus : 2.0 * std::hypot((omega0 - omega1) / 4.0, coupling);
  s.amplitude_coefficient = amplitude_coefficient((omega0 - omega1) / 2.0, coupling);
  return s;
}

}  // namespace

SpectrumResult energies(const WellParameters& params) {
  const double B = params.coupling();
  SpectrumResult s = doublet(params.omega0, params.omega1, B);
  if (params.K && params.s_inst) {
    const double d = params.omega1 - params.omega0;
    const double tunnel = *params.K * std::exp(-*params.s_inst);
    const double gap_from_action = std::sqrt(d * d / 4.0 + 4.0 * tunnel * tunnel);
    if (std::abs(gap_from_action - s.gap) > 1e-12 * std::max(1.0, s.gap))
      throw Error("internal", "gap from (K, S_inst) disagrees with gap from B", "B");
  }
  return s;
}

GasSum gas_sum_closed(const WellParameters& params) {
  const double B = params.coupling();
  if (B == 0.0 && params.delta == 0.0)
    invalid_argument("B", "delta and B are both zero: degenerate doublet has no amplitude");
  if (B == 0.0) return {0.0, true};
  const auto s = energies(params);
  const double value =
      s.amplitude_coefficient * (std::exp(-s.e_plus * params.T) - std::exp(-s.e_minus * params.T));
  return {value, false};
}

PartialGasSum gas_sum_partial(const WellParameters& params, int n_terms) {
  if (n_terms < 1) invalid_argument("n_terms", "n_terms must be >= 1");
  PartialGasSum out;
  const int limit = std::min(n_terms, kMomentDepthCap + 1);
  for (int i = 0; i < limit; ++i) {
    const double term = multi_instanton(i, params).full;
    out.terms.push_back(term);
    out.sum += term;
    if (i > 0 && std::abs(term) < 1e-16 * std::abs(out.sum)) break;
  }
  return out;
}

SpectrumResult truncated_hamiltonian(double omega0, double omega1, double coupling) {
  if (!(coupling >= 0.0)) invalid_argument("coupling", "coupling must be >= 0");
  return doublet(omega0, omega1, coupling);
}

CouplingEstimate extract_coupling(double measured_gap, double omega0, double omega1) {
  if (!(measured_gap >= 0.0)) invalid_argument("gap", "measured gap must be >= 0");
  const double half_split = std::abs(omega1 - omega0) / 2.0;
  const double excess = (measured_gap - half_split) * (measured_gap + half_split);
  if (excess <= 0.0) return {0.0, true};
  return {0.5 * std::sqrt(excess), false};
}

}  // namespace instanton_gas
