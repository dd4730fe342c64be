#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace instanton_gas::cli {

enum class OutputFormat { json, csv, table };

struct RunConfig {
  std::string command;  // moments, triangle-verify, sum, spectrum, benchmark, scaling
  std::map<std::string, std::string> parameters;  // flag name (no dashes) -> text value
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> output_path;
};

struct RunResult {
  int exit_code = 0;
  std::string output;  // empty when written to output_path
};

const std::vector<std::string>& commands();
/// Flags accepted by a command (without leading dashes).
const std::vector<std::string>& command_parameters(const std::string& command);

OutputFormat parse_format(const std::string& text);

/// {"command": ..., "format": ..., "output": ..., <flag>: value, ...}.
/// Numbers keep 17 significant digits; arrays become comma-separated lists.
RunConfig config_from_json(const nlohmann::json& j);

/// Validates, dispatches and serializes. Failures become exit code 1 with an
/// error object {code, message, parameter} (JSON format) or an "error:" line.
RunResult run(const RunConfig& config);

}  // namespace instanton_gas::cli
