#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scavsim/commands.hpp"

namespace cli = scavsim::cli;

int main(int argc, char** argv) {
  CLI::App app{"SCAV versus private CAV market simulator"};
  app.require_subcommand(1);

  cli::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "write a preset grid scenario");
  generate->add_option("--preset", gen.preset, "toronto-like or grid4")
      ->check(CLI::IsMember(cli::preset_names()));
  generate->add_option("--out", gen.out, "target directory")->required();
  generate->add_option("--seed", gen.seed, "master seed");

  cli::RunOptions run;
  std::size_t days = 0;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "simulate the day-to-day horizon");
  run_cmd->add_option("--scenario", run.scenario, "scenario file")->required();
  run_cmd->add_option("--seed", run.seeds, "master seed; repeat to run several")->take_all();
  auto* days_opt = run_cmd->add_option("--days", days, "override horizon.max_days");
  auto* out_opt = run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_flag("--emit-events", run.emit_events, "write per-day dispatcher event logs");
  run_cmd->add_option("--parallel", run.parallel, "workers for multiple seeds");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "charts and summary from a run directory");
  report->add_option("--out", report_dir, "run directory")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a scenario without simulating");
  validate->add_option("--scenario", validate_path, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  if (*generate) return cli::cmd_generate(gen, std::cout, std::cerr);
  if (*run_cmd) {
    if (*days_opt) run.days = days;
    if (*out_opt) run.out = run_out;
    return cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*report) return cli::cmd_report(report_dir, std::cout, std::cerr);
  return cli::cmd_validate(validate_path, std::cout, std::cerr);
}
