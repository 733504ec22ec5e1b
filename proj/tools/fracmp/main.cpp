#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional semilinear problems: mountain-pass and monotone-iteration solvers"};
  app.require_subcommand(1);
  std::string config_path;
  std::string chosen;
  for (const auto& name : fracmp::cli::kSubcommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    sub->callback([&chosen, name] { chosen = name; });
  }
  app.get_subcommand("assemble-check")->description("operator invariant suite");
  app.get_subcommand("solve-mp")->description("mountain-pass solution for one lambda");
  app.get_subcommand("solve-monotone")->description("sandwich iteration for one lambda");
  app.get_subcommand("sweep")->description("lambda sweep and two-solution report");
  app.get_subcommand("verify")->description("full property battery");
  CLI11_PARSE(app, argc, argv);

  try {
    const fracmp::cli::RunConfig cfg =
        config_path.empty() ? fracmp::cli::default_config() : fracmp::cli::parse_config(config_path);
    return fracmp::cli::run_subcommand(chosen, cfg, std::cout);
  } catch (const fracmp::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
