#include <instanton_gas/cli.hpp>
#include <instanton_gas/error.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace cli = instanton_gas::cli;

int main(int argc, char** argv) {
  CLI::App app{"Dilute instanton gas for asymmetric double wells"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string format;
  std::string output;
  std::string config_path;
  app.add_option("--format", format, "json (default), csv or table");
  app.add_option("--output", output, "write the result to a file instead of stdout");
  app.add_option("--config", config_path, "JSON file with command and parameters");

  // One string slot per flag; only flags given on the command line are forwarded.
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, CLI::App*> subcommands;
  for (const auto& name : cli::commands()) {
    auto* sub = app.add_subcommand(name);
    subcommands[name] = sub;
    for (const auto& flag : cli::command_parameters(name))
      options[name][flag] = sub->add_option("--" + flag, values[name][flag]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  cli::RunConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw instanton_gas::Error("io_error", "cannot read config '" + config_path + "'", "config");
      config = cli::config_from_json(nlohmann::json::parse(in));
    }
    for (const auto& [name, sub] : subcommands) {
      if (!sub->parsed()) continue;
      config.command = name;
      for (const auto& [flag, opt] : options[name])
        if (opt->count() > 0) config.parameters[flag] = values[name][flag];
    }
    if (!format.empty()) config.format = cli::parse_format(format);
    if (!output.empty()) config.output_path = output;
    if (config.command.empty())
      throw instanton_gas::Error("unknown_command", "no command given", "command");
    cli::command_parameters(config.command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  const auto result = cli::run(config);
  std::cout << result.output;
  return result.exit_code;
}
