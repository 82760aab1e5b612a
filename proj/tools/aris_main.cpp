// Command-line front end: run | compare | validate.
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aris/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Aerial-RIS relay mission simulator"};
  app.require_subcommand(1);

  aris::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Simulate one scenario and write result files");
  run->add_option("--scenario", run_opt.scenario_path, "Scenario file path")->required();
  run->add_option("--mode", run_opt.mode, "Trajectory mode: empc | baseline")
      ->check(CLI::IsMember({"empc", "baseline"}));
  run->add_option("--out", run_opt.out_dir, "Output directory (created if missing)")->required();
  CLI::Option* run_seed = run->add_option("--seed", run_opt.seed_override,
                                          "Override the scenario's RNG seed");
  run->add_flag("--quiet", run_opt.quiet, "Suppress stdout summary");

  aris::CompareOptions cmp_opt;
  CLI::App* cmp = app.add_subcommand("compare", "Run empc and baseline, write both plus a diff");
  cmp->add_option("--scenario", cmp_opt.scenario_path, "Scenario file path")->required();
  cmp->add_option("--out", cmp_opt.out_dir, "Output directory (created if missing)")->required();
  CLI::Option* cmp_seed = cmp->add_option("--seed", cmp_opt.seed_override,
                                          "Override the scenario's RNG seed");
  cmp->add_flag("--quiet", cmp_opt.quiet, "Suppress stdout summary");

  aris::ValidateOptions val_opt;
  CLI::App* val = app.add_subcommand("validate", "Run built-in numerical self-checks");
  val->add_option("--seed", val_opt.seed, "Seed for the randomized checks");
  val->add_flag("--paper-literal-b", val_opt.paper_literal_b,
                "Also report the target-vector variant gap");
  val->add_flag("--quiet", val_opt.quiet, "Only print failures and the final verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help; anything else is an input error.
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      run_opt.has_seed_override = run_seed->count() > 0;
      return aris::cmd_run(run_opt);
    }
    if (*cmp) {
      cmp_opt.has_seed_override = cmp_seed->count() > 0;
      return aris::cmd_compare(cmp_opt);
    }
    return aris::cmd_validate(val_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
