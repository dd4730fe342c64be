#include <instanton_gas/cli.hpp>
#include <instanton_gas/error.hpp>
#include <instanton_gas/serialize.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace instanton_gas::cli {

using nlohmann::json;

namespace {

const std::map<std::string, std::vector<std::string>>& parameter_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"spectrum", {"omega0", "omega1", "B", "K", "S-inst"}},
      {"moments",
       {"omega0", "omega1", "B", "K", "S-inst", "T", "n", "m", "method", "max-n", "max-m"}},
      {"triangle-verify", {"depth", "ratio"}},
      {"sum", {"omega0", "omega1", "B", "K", "S-inst", "T", "terms"}},
      {"benchmark", {"lambda", "b", "K", "x-min", "x-max", "points"}},
      {"scaling", {"b", "lambdas", "K", "x-min", "x-max", "points"}},
  };
  return table;
}

class Parameters {
 public:
  explicit Parameters(const RunConfig& config) : values_(config.parameters) {
    const auto& allowed = command_parameters(config.command);
    for (const auto& [name, value] : values_)
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
        throw Error("unknown_parameter", "parameter --" + name + " is not accepted by " + config.command,
                    name);
  }

  bool has(const std::string& name) const { return values_.count(name) != 0; }

  const std::string& text(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("missing_parameter", "missing required --" + name, name);
    return it->second;
  }

  double real(const std::string& name) const {
    const auto& s = text(name);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw Error("invalid_argument", "--" + name + " expects a real number, got '" + s + "'", name);
  }

  std::optional<double> optional_real(const std::string& name) const {
    return has(name) ? std::optional<double>(real(name)) : std::nullopt;
  }

  int integer(const std::string& name, std::optional<int> fallback = std::nullopt) const {
    if (!has(name)) {
      if (fallback) return *fallback;
      text(name);
    }
    const auto& s = text(name);
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error("invalid_argument", "--" + name + " expects an integer, got '" + s + "'", name);
  }

  std::vector<double> reals(const std::string& name) const {
    std::vector<double> out;
    std::stringstream ss(text(name));
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error("invalid_argument", "--" + name + " expects comma-separated reals", name);
      }
    }
    if (out.empty()) throw Error("invalid_argument", "--" + name + " is empty", name);
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

/// B directly, or (K, S-inst); all three must agree to 1e-12 relative.
WellParameters well_parameters_from(const Parameters& p, double T) {
  const double omega0 = p.real("omega0");
  const double omega1 = p.real("omega1");
  const auto K = p.optional_real("K");
  const auto S = p.optional_real("S-inst");
  const auto B = p.optional_real("B");
  if (B) {
    if (K && S) {
      const double derived = *K * std::exp(-*S);
      if (std::abs(derived - *B) > 1e-12 * std::max(std::abs(*B), std::abs(derived)))
        throw Error("inconsistent_parameters", "B disagrees with K exp(-S_inst)", "B");
    }
    auto params = WellParameters::from_coupling(omega0, omega1, *B, T);
    params.K = K;
    params.s_inst = S;
    return params;
  }
  if (K && S) return WellParameters::from_instanton(omega0, omega1, *K, *S, T);
  throw Error("missing_parameter", "supply --B or both --K and --S-inst", "B");
}

GridSpec grid_from(const Parameters& p) {
  GridSpec g = benchmark_grid();
  if (p.has("x-min")) g.x_min = p.real("x-min");
  if (p.has("x-max")) g.x_max = p.real("x-max");
  if (p.has("points")) g.points = p.integer("points");
  return g;
}

std::string table_number(double x) {
  std::ostringstream out;
  out << std::setprecision(6) << x;
  return out.str();
}

std::string table(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
  return out.str();
}

std::string dump(const json& j) { return j.dump() + "\n"; }

std::string run_spectrum(const Parameters& p, OutputFormat format) {
  const auto params = well_parameters_from(p, 1.0);
  const auto s = energies(params);
  if (format == OutputFormat::table)
    return table({{"e_plus", table_number(s.e_plus)},
                  {"e_minus", table_number(s.e_minus)},
                  {"gap", table_number(s.gap)},
                  {"amplitude_coefficient", table_number(s.amplitude_coefficient)}});
  if (format == OutputFormat::csv)
    return "e_plus,e_minus,gap,amplitude_coefficient\n" + format_float(s.e_plus) + "," +
           format_float(s.e_minus) + "," + format_float(s.gap) + "," +
           format_float(s.amplitude_coefficient) + "\n";
  return dump(to_json(s));
}

std::string run_moments(const Parameters& p, OutputFormat format) {
  const auto params = well_parameters_from(p, p.real("T"));
  if (p.has("max-n") || p.has("max-m")) {
    const auto t = moment_recursive(p.integer("max-n", 0), p.integer("max-m", 0), params);
    if (format == OutputFormat::csv) return to_csv(t);
    if (format == OutputFormat::json) return dump(to_json(t));
    std::ostringstream out;
    for (int n = 0; n <= t.max_n(); ++n)
      for (int m = 0; m <= t.max_m(); ++m)
        out << std::setw(4) << n << std::setw(4) << m << "  " << table_number(t.at(n, m).stripped)
            << "  " << table_number(t.at(n, m).full) << '\n';
    return out.str();
  }

  const MomentKey key{p.integer("n", 0), p.integer("m", 0)};
  const std::string method = p.has("method") ? p.text("method") : "all";
  std::vector<MomentValue> values;
  auto want = [&](const char* name) { return method == name || method == "all"; };
  if (!(method == "all" || method == "closed" || method == "recursive" || method == "quadrature" ||
        method == "symmetric" || method == "auto"))
    throw Error("invalid_argument", "unknown --method '" + method + "'", "method");
  const bool symmetric = params.delta == 0.0;
  if (want("closed") && !symmetric) values.push_back(moment_closed(key, params));
  if (want("recursive") && !symmetric)
    values.push_back(moment_recursive(key.n, key.m, params).at(key.n, key.m));
  if (want("quadrature")) values.push_back(moment_quadrature(key, params));
  if (method == "symmetric" || (method == "all" && symmetric)) {
    if (!symmetric) throw Error("invalid_argument", "--method symmetric requires omega0 == omega1", "method");
    values.push_back(moment_symmetric(key, params.coupling(), params.T, params.omega0));
  }
  if (method == "auto") {
    if (key.n != key.m) throw Error("invalid_argument", "--method auto evaluates M_i and needs n == m", "m");
    values.push_back(multi_instanton(key.n, params));
  }
  if (values.empty())
    throw Error("invalid_argument", "method '" + method + "' is undefined for delta = 0", "method");

  if (format == OutputFormat::csv) {
    std::string out = "n,m,stripped,full,method\n";
    for (const auto& v : values)
      out += std::to_string(key.n) + "," + std::to_string(key.m) + "," + format_float(v.stripped) +
             "," + format_float(v.full) + "," + std::string(to_string(v.method)) + "\n";
    return out;
  }
  if (format == OutputFormat::table) {
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& v : values)
      rows.emplace_back(std::string(to_string(v.method)),
                        table_number(v.stripped) + "  " + table_number(v.full));
    return table(rows);
  }
  json j = {{"n", key.n}, {"m", key.m}, {"values", json::array()}};
  for (const auto& v : values) j["values"].push_back(to_json(v));
  return dump(j);
}

std::string run_triangle_verify(const Parameters& p, OutputFormat format) {
  const int depth = p.integer("depth", 12);
  const Rational ratio = parse_ratio(p.text("ratio"));
  const auto report = verify_relations(build_triangle(depth, ratio));
  if (format == OutputFormat::json) return dump(to_json(report));
  if (format == OutputFormat::csv) {
    std::string out = "relation,checked,failures\n";
    for (const auto& f : report.families)
      out += f.name + "," + std::to_string(f.checked) + "," + std::to_string(f.failures) + "\n";
    out += report.central.name + "," + std::to_string(report.central.checked) + "," +
           std::to_string(report.central.failures) + "\n";
    return out;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& f : report.families)
    rows.emplace_back(f.name, std::to_string(f.checked) + " checked, " + std::to_string(f.failures) + " failed");
  rows.emplace_back(report.central.name, std::to_string(report.central.checked) + " checked, " +
                                             std::to_string(report.central.failures) + " failed");
  std::ostringstream out;
  out << "depth " << depth << ", ratio " << to_string(ratio) << '\n'
      << table(rows) << "relations checked: " << report.families.size()
      << " families, failures: " << report.total_failures() << '\n';
  return out.str();
}

std::string run_sum(const Parameters& p, OutputFormat format) {
  const auto params = well_parameters_from(p, p.real("T"));
  const int terms = p.integer("terms", 40);
  const auto closed = gas_sum_closed(params);
  const auto partial = gas_sum_partial(params, terms);
  const double rel = closed.value == 0.0 ? std::abs(partial.sum)
                                         : std::abs(partial.sum - closed.value) / std::abs(closed.value);
  if (format == OutputFormat::table)
    return table({{"closed", table_number(closed.value)},
                  {"partial", table_number(partial.sum)},
                  {"terms_used", std::to_string(partial.terms.size())},
                  {"relative_difference", table_number(rel)}});
  if (format == OutputFormat::csv) {
    std::string out = "i,term\n";
    for (std::size_t i = 0; i < partial.terms.size(); ++i)
      out += std::to_string(i) + "," + format_float(partial.terms[i]) + "\n";
    return out;
  }
  return dump({{"closed", closed.value},
               {"decoupled", closed.decoupled},
               {"partial", partial.sum},
               {"terms", partial.terms},
               {"relative_difference", rel}});
}

std::string run_benchmark(const Parameters& p, OutputFormat format) {
  const auto record = benchmark_point(p.real("lambda"), p.real("b"), grid_from(p));
  std::optional<double> predicted;
  if (p.has("K"))
    predicted = energies(WellParameters::from_instanton(record.omega0, record.omega1, p.real("K"),
                                                        record.s_inst, 1.0))
                    .gap;
  if (format == OutputFormat::csv) return to_csv(std::vector<BenchmarkRecord>{record});
  if (format == OutputFormat::table) {
    std::vector<std::pair<std::string, std::string>> rows = {
        {"lambda", table_number(record.lambda)},     {"s_inst", table_number(record.s_inst)},
        {"omega0", table_number(record.omega0)},     {"omega1", table_number(record.omega1)},
        {"gap_numeric", table_number(record.gap_numeric)}, {"b_prime", table_number(record.b_prime)},
        {"refinement_error", table_number(record.refinement_error)}};
    if (predicted) rows.emplace_back("gap_predicted", table_number(*predicted));
    return table(rows);
  }
  auto j = to_json(record);
  if (predicted) j["gap_predicted"] = *predicted;
  return dump(j);
}

std::string run_scaling(const Parameters& p, OutputFormat format) {
  const std::vector<double> lambdas =
      p.has("lambdas") ? p.reals("lambdas") : std::vector<double>{2, 3, 4, 5, 6};
  const auto study = scaling_study(p.real("b"), lambdas, p.optional_real("K"), grid_from(p));
  if (format == OutputFormat::csv) return to_csv(study.records);
  if (format == OutputFormat::table) {
    std::ostringstream out;
    out << std::setw(10) << "lambda" << std::setw(14) << "s_inst" << std::setw(14) << "gap"
        << std::setw(14) << "b_prime" << '\n';
    for (const auto& r : study.records)
      out << std::setw(10) << table_number(r.lambda) << std::setw(14) << table_number(r.s_inst)
          << std::setw(14) << table_number(r.gap_numeric) << std::setw(14) << table_number(r.b_prime)
          << '\n';
    out << "slope " << table_number(study.slope) << ", intercept " << table_number(study.intercept)
        << '\n';
    return out.str();
  }
  return dump(to_json(study));
}

std::string error_output(const Error& e, OutputFormat format) {
  if (format == OutputFormat::json)
    return dump({{"error", {{"code", e.code()}, {"message", e.what()}, {"parameter", e.parameter()}}}});
  std::string out = "error [" + e.code() + "]: " + e.what();
  if (!e.parameter().empty()) out += " (parameter " + e.parameter() + ")";
  return out + "\n";
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"moments", "triangle-verify", "sum",
                                                 "spectrum", "benchmark",       "scaling"};
  return names;
}

const std::vector<std::string>& command_parameters(const std::string& command) {
  const auto& t = parameter_table();
  auto it = t.find(command);
  if (it == t.end()) throw Error("unknown_command", "unknown command '" + command + "'", "command");
  return it->second;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "table") return OutputFormat::table;
  throw Error("invalid_argument", "--format must be json, csv or table", "format");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) invalid_argument("config", "config must be a JSON object");
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      config.command = value.get<std::string>();
    } else if (key == "format") {
      config.format = parse_format(value.get<std::string>());
    } else if (key == "output") {
      config.output_path = value.get<std::string>();
    } else if (value.is_string()) {
      config.parameters[key] = value.get<std::string>();
    } else if (value.is_number_integer()) {
      config.parameters[key] = std::to_string(value.get<long long>());
    } else if (value.is_number()) {
      config.parameters[key] = format_float(value.get<double>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ',';
        joined += item.is_number() ? format_float(item.get<double>()) : item.get<std::string>();
      }
      config.parameters[key] = joined;
    } else {
      invalid_argument(key, "unsupported config value type");
    }
  }
  return config;
}

RunResult run(const RunConfig& config) {
  RunResult result;
  try {
    const Parameters p(config);
    std::string out;
    if (config.command == "spectrum") out = run_spectrum(p, config.format);
    else if (config.command == "moments") out = run_moments(p, config.format);
    else if (config.command == "triangle-verify") out = run_triangle_verify(p, config.format);
    else if (config.command == "sum") out = run_sum(p, config.format);
    else if (config.command == "benchmark") out = run_benchmark(p, config.format);
    else out = run_scaling(p, config.format);

    if (config.output_path) {
      std::ofstream file(*config.output_path, std::ios::binary);
      if (!file || !(file << out) || !file.flush())
        throw Error("io_error", "cannot write output file '" + *config.output_path + "'", "output");
    } else {
      result.output = std::move(out);
    }
  } catch (const Error& e) {
    result.exit_code = 1;
    result.output = error_output(e, config.format);
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.output = error_output(Error("internal", e.what()), config.format);
  }
  return result;
}

}  // namespace instanton_gas::cli
