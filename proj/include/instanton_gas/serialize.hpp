#pragma once

#include <instanton_gas/moments.hpp>
#include <instanton_gas/potential.hpp>
#include <instanton_gas/schrodinger.hpp>
#include <instanton_gas/spectrum.hpp>
#include <instanton_gas/triangle.hpp>

#include <json.hpp>

#include <string>

namespace instanton_gas {

/// %.17g: round-trips every double.
std::string format_float(double x);

nlohmann::json potential_to_json(const PolynomialPotential& potential);
PolynomialPotential potential_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SpectrumResult& s);
nlohmann::json to_json(const MomentValue& v);
nlohmann::json to_json(const MomentTable& table);
nlohmann::json to_json(const BenchmarkRecord& r);
nlohmann::json to_json(const ScalingStudy& study);
nlohmann::json to_json(const VerificationReport& report);

/// Header n,m,stripped,full,method.
std::string to_csv(const MomentTable& table);
/// Header lambda,s_inst,omega0,omega1,gap_numeric,b_prime,refinement_error.
std::string to_csv(const std::vector<BenchmarkRecord>& records);

}  // namespace instanton_gas
