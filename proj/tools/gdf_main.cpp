#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gdf/cli.hpp"
#include "gdf/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SLA-constrained transfer tuning: offline analysis, simulation, reports"};
  app.require_subcommand(1);

  gdf::cli::AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Build a solution cache from transfer logs");
  analyze->add_option("--logs", analyze_args.logs_path, "historical log file")->required();
  analyze->add_option("--out", analyze_args.out_path, "cache output path")->required();
  analyze->add_option("--clusters", analyze_args.clusters, "maximum cluster count");
  analyze->add_option("--sla-levels", analyze_args.sla_levels, "partition levels per SLA kind");

  gdf::cli::RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario under a controller");
  run->add_option("--scenario", run_args.scenario_path, "scenario file")->required();
  run->add_option("--controller", run_args.controller,
                  "maxth|minpow|typeT|typeE|typeP|htee|static|single|centralized")
      ->required();
  run->add_option("--cache", run_args.cache_path, "solution cache file");
  run->add_option("--seed", run_args.seed, "seed override (0 = scenario seed)");
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  run->add_flag("--no-opportunistic", [&](int64_t) { run_args.opportunistic = false; },
                "disable opportunistic banking");

  gdf::cli::FairnessArgs fairness_args;
  auto* fairness = app.add_subcommand("fairness", "Utilization and Jain index report");
  fairness->add_option("--scenario", fairness_args.scenario_path, "scenario file")->required();
  fairness->add_option("--controller", fairness_args.controller, "controller name")->required();
  fairness->add_option("--cache", fairness_args.cache_path, "solution cache file");
  fairness->add_option("--seed", fairness_args.seed, "seed override");

  gdf::cli::SlaReportArgs sla_args;
  std::string kind_str = "T";
  auto* sla = app.add_subcommand("sla-report", "Sweep SLA levels and report accuracy");
  sla->add_option("--scenario", sla_args.scenario_path, "scenario file")->required();
  sla->add_option("--cache", sla_args.cache_path, "solution cache file")->required();
  sla->add_option("--kind", kind_str, "T, E or P")->required();
  sla->add_option("--levels", sla_args.levels, "level index or lo-hi range")->required();
  sla->add_option("--seed", sla_args.seed, "seed override");
  sla->add_flag("--no-opportunistic", [&](int64_t) { sla_args.opportunistic = false; },
                "disable opportunistic banking");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      gdf::cli::cmd_analyze(analyze_args, std::cout);
    } else if (run->parsed()) {
      gdf::cli::cmd_run(run_args, std::cout);
    } else if (fairness->parsed()) {
      gdf::cli::cmd_fairness(fairness_args, std::cout);
    } else if (sla->parsed()) {
      if (kind_str.size() != 1) throw gdf::ConfigError("--kind must be T, E or P");
      sla_args.kind = kind_str[0];
      gdf::cli::cmd_sla_report(sla_args, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
