#include <instanton_gas/error.hpp>
#include <instanton_gas/serialize.hpp>

#include <cstdio>
#include <sstream>

namespace instanton_gas {

using nlohmann::json;

std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json potential_to_json(const PolynomialPotential& potential) {
  json c = json::array();
  for (double x : potential.coefficients()) c.push_back(x);
  return {{"coefficients", c}};
}

PolynomialPotential potential_from_json(const json& j) {
  if (!j.is_object() || !j.contains("coefficients") || !j["coefficients"].is_array())
    invalid_argument("coefficients", "potential JSON must be {\"coefficients\": [...]}");
  std::vector<double> c;
  for (const auto& v : j["coefficients"]) {
    if (v.is_number()) {
      c.push_back(v.get<double>());
    } else if (v.is_string()) {
      try {
        std::size_t used = 0;
        const auto s = v.get<std::string>();
        c.push_back(std::stod(s, &used));
        if (used != s.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        invalid_argument("coefficients", "coefficient string is not a decimal number");
      }
    } else {
      invalid_argument("coefficients", "coefficients must be numbers or decimal strings");
    }
  }
  return PolynomialPotential(std::move(c));
}

json to_json(const SpectrumResult& s) {
  return {{"e_plus", s.e_plus},
          {"e_minus", s.e_minus},
          {"gap", s.gap},
          {"amplitude_coefficient", s.amplitude_coefficient}};
}

json to_json(const MomentValue& v) {
  return {{"stripped", v.stripped}, {"full", v.full}, {"method", std::string(to_string(v.method))}};
}

json to_json(const MomentTable& table) {
  json rows = json::array();
  for (int n = 0; n <= table.max_n(); ++n)
    for (int m = 0; m <= table.max_m(); ++m) {
      auto row = to_json(table.at(n, m));
      row["n"] = n;
      row["m"] = m;
      rows.push_back(row);
    }
  return {{"max_n", table.max_n()}, {"max_m", table.max_m()}, {"moments", rows}};
}

json to_json(const BenchmarkRecord& r) {
  return {{"lambda", r.lambda},           {"s_inst", r.s_inst},
          {"omega0", r.omega0},           {"omega1", r.omega1},
          {"gap_numeric", r.gap_numeric}, {"b_prime", r.b_prime},
          {"refinement_error", r.refinement_error}};
}

json to_json(const ScalingStudy& study) {
  json records = json::array();
  for (const auto& r : study.records) records.push_back(to_json(r));
  json excluded = json::array();
  for (const auto& e : study.excluded) excluded.push_back({{"lambda", e.lambda}, {"reason", e.reason}});
  json out = {{"b", study.b},
              {"slope", study.slope},
              {"intercept", study.intercept},
              {"residuals", study.residuals},
              {"records", records},
              {"excluded", excluded}};
  if (!study.predicted_gaps.empty()) out["predicted_gaps"] = study.predicted_gaps;
  return out;
}

json to_json(const VerificationReport& report) {
  json families = json::array();
  for (const auto& f : report.families)
    families.push_back({{"name", f.name}, {"checked", f.checked}, {"failures", f.failures}});
  return {{"depth", report.depth},
          {"ratio", to_string(report.ratio)},
          {"families", families},
          {"central_recurrence",
           {{"checked", report.central.checked}, {"failures", report.central.failures}}},
          {"failures", report.total_failures()}};
}

std::string to_csv(const MomentTable& table) {
  std::ostringstream out;
  out << "n,m,stripped,full,method\n";
  for (int n = 0; n <= table.max_n(); ++n)
    for (int m = 0; m <= table.max_m(); ++m) {
      const auto v = table.at(n, m);
      out << n << ',' << m << ',' << format_float(v.stripped) << ',' << format_float(v.full) << ','
          << to_string(v.method) << '\n';
    }
  return out.str();
}

std::string to_csv(const std::vector<BenchmarkRecord>& records) {
  std::ostringstream out;
  out << "lambda,s_inst,omega0,omega1,gap_numeric,b_prime,refinement_error\n";
  for (const auto& r : records)
    out << format_float(r.lambda) << ',' << format_float(r.s_inst) << ',' << format_float(r.omega0)
        << ',' << format_float(r.omega1) << ',' << format_float(r.gap_numeric) << ','
        << format_float(r.b_prime) << ',' << format_float(r.refinement_error) << '\n';
  return out.str();
}

}  // namespace instanton_gas
