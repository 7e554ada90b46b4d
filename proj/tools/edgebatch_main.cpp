#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgebatch/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"edgebatch: joint scheduling and bandwidth allocation for "
               "batched edge inference with early exits"};
  app.require_subcommand(1);

  // solve
  std::string instance_path;
  std::string policy = "p2-opt";
  bool no_bandwidth = false;
  CLI::App* solve = app.add_subcommand("solve", "solve one instance file");
  solve->add_option("instance", instance_path, "instance JSON file")->required();
  solve->add_option("--policy", policy, "p1 | p2-sub | p2-opt");
  solve->add_flag("--no-bandwidth", no_bandwidth, "ignore the bandwidth constraint");

  // sweep
  edgebatch::SweepOptions sweep_options;
  CLI::App* sweep = app.add_subcommand("sweep", "run a simulation sweep to CSV");
  sweep->add_option("scenario", sweep_options.scenario_path, "scenario JSON file")
      ->required();
  sweep->add_option("--vary", sweep_options.vary,
                    "lambda | slot | mean-accuracy | mean-latency");
  sweep->add_option("--grid", sweep_options.grid, "grid values (default per axis)");
  sweep->add_option("--policies", sweep_options.policies,
                    "full-opt ee-sub ee-opt single static");
  sweep->add_option("--seeds", sweep_options.seeds, "seeds per grid point");
  sweep->add_option("-o,--output", sweep_options.output_csv, "output CSV path");
  sweep->add_option("--static-batch", sweep_options.static_params.batch_size,
                    "batch size for the static baseline");
  sweep->add_option("--static-timeout", sweep_options.static_params.timeout_s,
                    "timeout for the static baseline (s)");
  sweep->add_option("--workers", sweep_options.workers,
                    "worker threads (default: EDGEBATCH_WORKERS or hardware)");

  // bench-pruning
  edgebatch::BenchPruningOptions bench_options;
  CLI::App* bench = app.add_subcommand(
      "bench-pruning", "compare pruned vs exhaustive tree-search node counts");
  bench->add_option("scenario", bench_options.scenario_path,
                    "scenario JSON for the task marks (optional)");
  bench->add_option("--K", bench_options.task_counts, "tasks per instance");
  bench->add_option("--D", bench_options.depths, "exit depths");
  bench->add_option("--instances", bench_options.instances, "instances per (K,D)");
  bench->add_option("--seed", bench_options.seed, "base seed");
  bench->add_option("-o,--output", bench_options.output_csv, "output CSV path");
  bench->add_option("--node-cap", bench_options.node_cap,
                    "abort threshold for one search run");

  // certify
  edgebatch::CertifyOptions certify_options;
  CLI::App* certify = app.add_subcommand(
      "certify", "randomized solver-vs-oracle certification");
  certify->add_option("--K", certify_options.max_tasks, "max tasks per instance");
  certify->add_option("--D", certify_options.max_depth, "max exit depth");
  certify->add_option("--instances", certify_options.instances, "instance count");
  certify->add_option("--seed", certify_options.seed, "base seed");
  certify->add_option("--failure-out", certify_options.failure_path,
                      "where to write the first failing instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? edgebatch::kExitOk : edgebatch::kExitUsage;
  }

  try {
    if (solve->parsed())
      return edgebatch::cmd_solve(instance_path, policy, no_bandwidth, std::cout,
                                  std::cerr);
    if (sweep->parsed())
      return edgebatch::cmd_sweep(sweep_options, std::cout, std::cerr);
    if (bench->parsed())
      return edgebatch::cmd_bench_pruning(bench_options, std::cout, std::cerr);
    if (certify->parsed())
      return edgebatch::cmd_certify(certify_options, std::cout, std::cerr);
  } catch (const edgebatch::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return edgebatch::kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return edgebatch::kExitUsage;
  }
  return edgebatch::kExitUsage;
}
