// Command-line front end: miura <command> --config <file> [--out <dir>] [--seed <u64>]

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "miura/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for logarithmic representations and Miura-type transforms"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  for (const auto& name : miura::known_commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "fixture seed (overrides seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : miura::kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    miura::ExperimentConfig cfg = miura::load_config(config_path);
    if (!cfg.command.empty() && cfg.command != command)
      throw miura::ConfigError("config is for command \"" + cfg.command + "\", not \"" + command + "\"");
    cfg.command = command;
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--out")) cfg.output_dir = out_dir;
    if (sub->count("--seed")) cfg.seed = seed;

    const miura::Report report = miura::run(cfg);
    std::size_t failed = 0;
    for (const auto& c : report.cases) failed += c.pass ? 0 : 1;
    std::cout << command << ": " << report.cases.size() - failed << "/" << report.cases.size()
              << " cases passed, max residual " << miura::format_double(report.max_residual()) << "\n";
    return miura::exit_code(report);
  } catch (const miura::ConfigError& e) {
    miura::log(miura::LogLevel::error, e.what());
    return miura::kExitConfigError;
  } catch (const std::exception& e) {
    miura::log(miura::LogLevel::error, e.what());
    return miura::kExitComputeError;
  }
}
