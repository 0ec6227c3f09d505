#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "micromorph/runner.hpp"

namespace mm = micromorph;

int main(int argc, char** argv) {
  CLI::App app{"Micromorphic balance laws and J/L/M integrals on manufactured solutions"};
  app.require_subcommand(1);

  mm::RunConfig cfg;
  std::string commands = "check-el,check-balance,integrals,convergence";
  std::string format = "table";
  int surface_order = 0;
  int volume_order = 0;

  CLI::App* run = app.add_subcommand("run", "run checks on a scenario and write a report");
  run->add_option("--scenario", cfg.scenario, "builtin scenario name or scenario file")->capture_default_str();
  run->add_option("--commands", commands, "comma-separated subset of check-el,check-balance,integrals,convergence")
      ->capture_default_str();
  run->add_option("--out", cfg.out, "report path (default: standard output)");
  run->add_option("--format", format, "table | csv | json")->capture_default_str();
  run->add_option("--points", cfg.points, "random sample points for pointwise checks")->capture_default_str();
  run->add_option("--seed", cfg.seed, "seed for the sample points")->capture_default_str();
  run->add_option("--surface-order", surface_order, "Gauss points per direction on surfaces")
      ->check(CLI::Range(2, 256));
  run->add_option("--volume-order", volume_order, "Gauss points per direction in volumes")->check(CLI::Range(2, 256));
  run->add_flag("--energy-without-sources", cfg.energy_without_sources,
                "drop -u.F - phi:L from the energy inside the currents");
  run->add_option("--threads", cfg.threads, "worker threads for point evaluation (0: hardware)")
      ->check(CLI::NonNegativeNumber);

  app.add_subcommand("list-scenarios", "list builtin scenarios");

  std::string validate_target;
  CLI::App* validate = app.add_subcommand("validate", "parse a scenario and check its invariants");
  validate->add_option("--scenario", validate_target, "builtin scenario name or scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("list-scenarios")) {
    for (const auto& info : mm::builtin_list()) std::cout << info.name << "\t" << info.description << "\n";
    return 0;
  }
  if (app.got_subcommand("validate")) return mm::validate(validate_target, std::cout, std::cerr);

  const auto fmt = mm::parse_format(format);
  if (!fmt) {
    std::cerr << "error: unknown format \"" << format << "\"\n";
    return 2;
  }
  cfg.format = *fmt;
  cfg.commands.clear();
  std::size_t start = 0;
  while (start <= commands.size()) {
    std::size_t end = commands.find(',', start);
    if (end == std::string::npos) end = commands.size();
    const std::string token = commands.substr(start, end - start);
    start = end + 1;
    if (token.empty()) continue;
    const auto cmd = mm::parse_command(token);
    if (!cmd) {
      std::cerr << "error: unknown command \"" << token << "\"\n";
      return 2;
    }
    cfg.commands.push_back(*cmd);
  }
  if (surface_order > 0) cfg.surface_order = surface_order;
  if (volume_order > 0) cfg.volume_order = volume_order;
  return mm::run(cfg, std::cout, std::cerr);
}
