#pragma once

#include <instanton_gas/potential.hpp>

#include <vector>

namespace instanton_gas {

/// Lowest doublet. e_plus <= e_minus; gap = e_minus - e_plus;
/// amplitude_coefficient = 1 / (2 sqrt(1 + (delta / 2B)^2)).
struct SpectrumResult {
  double e_plus = 0.0;
  double e_minus = 0.0;
  double gap = 0.0;
  double amplitude_coefficient = 0.0;
};

/// E+- = (w0 + w1)/4 -+ sqrt(delta^2/4 + B^2). When K and S_inst are known the
/// gap is also formed from them and cross-checked.
SpectrumResult energies(const WellParameters& params);

struct GasSum {
  double value = 0.0;
  bool decoupled = false;  // B == 0: no path connects the wells
};

/// Summed dilute-gas amplitude C (e^{-E+ T} - e^{-E- T}).
GasSum gas_sum_closed(const WellParameters& params);

struct PartialGasSum {
  double sum = 0.0;
  std::vector<double> terms;  // full M_i, i = 0..terms.size()-1
};

/// sum_{i < n_terms} M_i. Stops early once a term's relative contribution
/// drops below 1e-16, and never goes past the moment depth cap.
PartialGasSum gas_sum_partial(const WellParameters& params, int n_terms);

/// Eigenvalues of [[w0/2, B'], [B', w1/2]].
SpectrumResult truncated_hamiltonian(double omega0, double omega1, double coupling);

struct CouplingEstimate {
  double coupling = 0.0;
  bool asymmetry_dominated = false;  // gap^2 <= (w1 - w0)^2 / 4, clamped to 0
};

/// B' = sqrt(max(gap^2 - (w1 - w0)^2/4, 0)) / 2.
CouplingEstimate extract_coupling(double measured_gap, double omega0, double omega1);

}  // namespace instanton_gas
