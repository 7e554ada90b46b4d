#include "edgebatch/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "edgebatch/instance_gen.hpp"
#include "edgebatch/oracle.hpp"
#include "edgebatch/rng.hpp"
#include "edgebatch/solver_ee.hpp"
#include "edgebatch/solver_full.hpp"

namespace edgebatch {

namespace {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EDGEBATCH_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int jobs, int workers, const std::function<void(int)>& body) {
  if (jobs <= 0) return;
  workers = std::min(workers, jobs);
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= jobs) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

int cmd_solve(const std::string& instance_path, const std::string& policy,
              bool no_bandwidth, std::ostream& out, std::ostream& err) {
  Instance instance;
  try {
    instance = load_instance_file(instance_path);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitSchema;
  }

  Selection selection;
  SearchStats stats;
  if (policy == "p1") {
    selection = solve_p1(instance, no_bandwidth);
  } else if (policy == "p2-sub") {
    selection = solve_p2_suboptimal(instance, no_bandwidth);
  } else if (policy == "p2-opt") {
    TreeSearchOptions options;
    options.ignore_bandwidth = no_bandwidth;
    P2Result result = solve_p2_optimal(instance, options);
    selection = std::move(result.selection);
    stats = result.stats;
  } else {
    err << "unknown policy: " << policy << " (use p1, p2-sub or p2-opt)\n";
    return kExitUsage;
  }

  out << "instance: " << instance_path << "\n";
  out << "policy: " << policy << (no_bandwidth ? " (bandwidth ignored)" : "")
      << "\n";
  out << "selected (" << selection.cardinality() << "):";
  for (std::int64_t id : selection.selected_ids) out << ' ' << id;
  out << "\n";
  out << "per-depth cardinalities:";
  for (const auto& group : selection.per_depth) out << ' ' << group.size();
  out << "\n";
  out << "sum rho_min: " << format_double(selection.bandwidth_sum()) << "\n";
  out << "predicted compute (s):";
  for (std::int64_t id : selection.selected_ids)
    out << ' ' << id << ':' << format_double(selection.predicted_compute_s.at(id));
  out << "\n";
  out << "nodes visited: " << stats.nodes_visited << "\n";
  return kExitOk;
}

namespace {

std::vector<double> default_grid(const std::string& vary) {
  if (vary == "lambda") return {10, 25, 50, 75, 100, 125, 150};
  if (vary == "slot") return {0.05, 0.1, 0.15, 0.25, 0.5, 0.75, 1.0};
  if (vary == "mean-accuracy") return {0.62, 0.645, 0.67, 0.695, 0.72};
  if (vary == "mean-latency") return {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  return {};
}

Scenario scenario_at(const Scenario& base, const std::string& vary, double value) {
  Scenario scenario = base;
  if (vary == "lambda") {
    scenario.arrival_rate = value;
  } else if (vary == "slot") {
    scenario.config.slot_duration_s = value;
    scenario.config.comm_slot_s = value;
    scenario.config.comp_slot_s = value;
  } else if (vary == "mean-accuracy") {
    double width = 0.06;
    if (base.accuracy_dist) width = base.accuracy_dist->hi - base.accuracy_dist->lo;
    UniformRange range;
    range.lo = std::max(1e-6, value - width / 2.0);
    range.hi = std::min(1.0 - 1e-6, value + width / 2.0);
    scenario.accuracy_dist = range;
  } else if (vary == "mean-latency") {
    scenario.deadline_dist.lo = std::max(0.0, value - 0.25);
    scenario.deadline_dist.hi = value + 0.25;
  }
  return scenario;
}

double upper_bound_rate(const Scenario& scenario, const std::string& vary) {
  const BoundVariant variant =
      vary == "lambda" ? BoundVariant::Asymptotic : BoundVariant::SlotLimited;
  const double bound = throughput_upper_bound(
      scenario.profile, scenario.config.comp_slot_s, variant);
  return std::min(1.0, bound / scenario.arrival_rate);
}

struct SweepRun {
  std::size_t grid_index = 0;
  std::size_t policy_index = 0;
  int seed_index = 0;
  SimMetrics metrics;
};

}  // namespace

SweepOutput run_sweep(const Scenario& base, const SweepOptions& options) {
  std::vector<double> grid =
      options.grid.empty() ? default_grid(options.vary) : options.grid;
  if (grid.empty())
    throw std::domain_error("unknown sweep axis: " + options.vary);
  if (options.seeds < 1) throw std::domain_error("seeds must be >= 1");

  std::vector<SweepRun> runs;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t p = 0; p < options.policies.size(); ++p)
      for (int s = 0; s < options.seeds; ++s)
        runs.push_back({g, p, s, {}});

  parallel_for(static_cast<int>(runs.size()), worker_count(options.workers),
               [&](int i) {
                 SweepRun& run = runs[static_cast<std::size_t>(i)];
                 Scenario scenario =
                     scenario_at(base, options.vary, grid[run.grid_index]);
                 scenario.seed = base.seed + static_cast<std::uint64_t>(run.seed_index);
                 const std::string& policy = options.policies[run.policy_index];
                 if (policy == "single") {
                   run.metrics = run_baseline_single_instance(scenario);
                 } else if (policy == "static") {
                   run.metrics = run_baseline_static_batching(
                       scenario, options.static_params.batch_size,
                       options.static_params.timeout_s);
                 } else {
                   const auto parsed = policy_from_name(policy);
                   if (!parsed)
                     throw std::domain_error("unknown policy: " + policy);
                   run.metrics = run_policy_sim(scenario, *parsed);
                 }
               });

  // Deterministic order regardless of the worker fan-out.
  std::sort(runs.begin(), runs.end(), [](const SweepRun& a, const SweepRun& b) {
    if (a.grid_index != b.grid_index) return a.grid_index < b.grid_index;
    if (a.policy_index != b.policy_index) return a.policy_index < b.policy_index;
    return a.seed_index < b.seed_index;
  });

  std::ostringstream csv;
  csv << metrics_csv_header() << ",upper_bound,row_type,ci95\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Scenario scenario = scenario_at(base, options.vary, grid[g]);
    const double bound = upper_bound_rate(scenario, options.vary);
    const std::string mean_acc =
        scenario.accuracy_dist ? format_double(scenario.accuracy_dist->mean())
                               : std::string();
    for (std::size_t p = 0; p < options.policies.size(); ++p) {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (const SweepRun& run : runs) {
        if (run.grid_index != g || run.policy_index != p) continue;
        csv << metrics_csv_row(scenario.scenario_id, options.policies[p],
                               scenario.arrival_rate,
                               scenario.config.slot_duration_s, mean_acc,
                               scenario.deadline_dist.mean(),
                               base.seed + static_cast<std::uint64_t>(run.seed_index),
                               run.metrics)
            << ',' << format_double(bound) << ",seed,\n";
        sum += run.metrics.completion_rate;
        sum_sq += run.metrics.completion_rate * run.metrics.completion_rate;
      }
      const double n = static_cast<double>(options.seeds);
      const double mean = sum / n;
      const double variance = std::max(0.0, sum_sq / n - mean * mean);
      const double ci95 =
          options.seeds > 1 ? 1.96 * std::sqrt(variance / (n - 1.0)) : 0.0;
      csv << scenario.scenario_id << ',' << options.policies[p] << ','
          << format_double(scenario.arrival_rate) << ','
          << format_double(scenario.config.slot_duration_s) << ',' << mean_acc
          << ',' << format_double(scenario.deadline_dist.mean()) << ",,,,,"
          << format_double(mean) << ",," << format_double(bound) << ",mean,"
          << format_double(ci95) << "\n";
    }
  }

  SweepOutput output;
  output.csv = csv.str();
  output.manifest.tool_version = kToolVersion;
  std::ostringstream command;
  command << "sweep --vary " << options.vary << " --seeds " << options.seeds
          << " --policies";
  for (const auto& p : options.policies) command << ' ' << p;
  command << " --grid";
  for (double v : grid) command << ' ' << format_double(v);
  if (std::find(options.policies.begin(), options.policies.end(), "static") !=
      options.policies.end()) {
    command << " --static-batch " << options.static_params.batch_size
            << " --static-timeout " << format_double(options.static_params.timeout_s);
  }
  output.manifest.command = command.str();
  for (int s = 0; s < options.seeds; ++s)
    output.manifest.seeds.push_back(base.seed + static_cast<std::uint64_t>(s));
  output.manifest.output_path = options.output_csv;
  return output;
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  Scenario base;
  std::string scenario_text;
  try {
    scenario_text = read_text_file(options.scenario_path);
    base = parse_scenario_json(scenario_text);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitSchema;
  }
  SweepOutput output;
  try {
    output = run_sweep(base, options);
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  output.manifest.inputs.emplace_back(options.scenario_path,
                                      sha256_hex(scenario_text));
  write_text_file(options.output_csv, output.csv);
  write_text_file(options.output_csv + ".manifest.json",
                  output.manifest.to_json());
  out << "wrote " << options.output_csv << " and manifest\n";
  return kExitOk;
}

namespace {

Instance bench_instance(RngStream& rng, const Scenario& scenario, int task_count,
                        int depth) {
  SystemConfig config = scenario.config;
  LatencyProfile profile = make_default_profile(depth);
  const double transmit_snr = std::pow(10.0, scenario.snr_db / 10.0);
  std::vector<TaskRequest> tasks;
  tasks.reserve(static_cast<std::size_t>(task_count));
  for (int i = 0; i < task_count; ++i) {
    TaskRequest task;
    task.id = i + 1;
    task.snr = std::max(transmit_snr * rng.exponential(1.0), 1e-12);
    task.feature_bits = scenario.feature_bits;
    task.deadline_s = rng.uniform(scenario.deadline_dist.lo, scenario.deadline_dist.hi);
    task.waiting_s = rng.uniform(0.0, config.comm_slot_s);
    task.exit_point = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(depth)));
    tasks.push_back(task);
  }
  return make_instance(std::move(config), std::move(profile), std::move(tasks));
}

}  // namespace

int cmd_bench_pruning(const BenchPruningOptions& options, std::ostream& out,
                      std::ostream& err) {
  Scenario scenario;  // defaults match the experiment settings
  if (!options.scenario_path.empty()) {
    try {
      scenario = load_scenario_file(options.scenario_path);
    } catch (const SchemaError& e) {
      err << "schema error: " << e.what() << "\n";
      return kExitSchema;
    }
  }

  std::ostringstream csv;
  csv << "instance_id,K,D,seed,n,pruning,nodes_visited,capped\n";
  std::ostringstream summary;
  int instance_id = 0;
  for (int depth : options.depths) {
    for (int task_count : options.task_counts) {
      std::vector<double> ratios;
      for (int i = 0; i < options.instances; ++i) {
        const std::uint64_t seed = options.seed;
        RngStream rng(seed, "bench", static_cast<std::uint64_t>(instance_id));
        const Instance instance = bench_instance(rng, scenario, task_count, depth);
        ++instance_id;

        std::int64_t pruned_total = 0;
        std::int64_t unpruned_total = 0;
        bool capped = false;
        for (int n = 1; n <= instance.task_count(); ++n) {
          TreeSearchOptions tree_options;
          tree_options.node_cap = options.node_cap;
          const TreeSearchResult pruned = solve_p4_tree(instance, n, tree_options);
          const oracle::ExhaustiveResult unpruned =
              oracle::exhaustive_tree_search(instance, n, options.node_cap);
          if (pruned.node_cap_hit || unpruned.node_cap_hit) {
            capped = true;
            break;
          }
          if (pruned.selection.has_value() != unpruned.selection.has_value()) {
            err << "verdict mismatch at instance " << instance_id << " n=" << n
                << "\n";
            return kExitCertify;
          }
          csv << instance_id << ',' << task_count << ',' << depth << ',' << seed
              << ',' << n << ",1," << pruned.stats.nodes_visited << ",0\n";
          csv << instance_id << ',' << task_count << ',' << depth << ',' << seed
              << ',' << n << ",0," << unpruned.stats.nodes_visited << ",0\n";
          pruned_total += pruned.stats.nodes_visited;
          unpruned_total += unpruned.stats.nodes_visited;
          if (!pruned.selection) break;
        }
        if (capped) {
          csv << instance_id << ',' << task_count << ',' << depth << ',' << seed
              << ",-1,1," << pruned_total << ",1\n";
          continue;  // flagged, not counted
        }
        if (pruned_total > 0)
          ratios.push_back(static_cast<double>(unpruned_total) /
                           static_cast<double>(pruned_total));
      }
      if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        const double median = ratios[ratios.size() / 2];
        summary << "K=" << task_count << " D=" << depth
                << " median node reduction: " << format_double(median) << "x ("
                << ratios.size() << " instances)\n";
      }
    }
  }
  write_text_file(options.output_csv, csv.str());
  RunManifest manifest;
  manifest.tool_version = kToolVersion;
  std::ostringstream command;
  command << "bench-pruning --instances " << options.instances << " --seed "
          << options.seed << " --node-cap " << options.node_cap << " --K";
  for (int k : options.task_counts) command << ' ' << k;
  command << " --D";
  for (int d : options.depths) command << ' ' << d;
  manifest.command = command.str();
  if (!options.scenario_path.empty()) {
    manifest.inputs.emplace_back(options.scenario_path,
                                 sha256_hex(read_text_file(options.scenario_path)));
  }
  manifest.seeds = {options.seed};
  manifest.output_path = options.output_csv;
  write_text_file(options.output_csv + ".manifest.json", manifest.to_json());
  out << summary.str();
  out << "wrote " << options.output_csv << "\n";
  return kExitOk;
}

int cmd_certify(const CertifyOptions& options, std::ostream& out,
                std::ostream& err) {
  for (int i = 0; i < options.instances; ++i) {
    RngStream rng(options.seed, "certify", static_cast<std::uint64_t>(i));
    RandomInstanceParams params;
    params.task_count =
        1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(options.max_tasks)));
    params.depth =
        options.max_depth <= 1
            ? 1
            : 2 + static_cast<int>(rng.next_below(
                      static_cast<std::uint64_t>(options.max_depth - 1)));
    const Instance instance = random_instance(rng, params);

    std::string failure;
    if (i == options.inject_failure_at) failure = "injected failure (test hook)";
    const Selection p1 = solve_p1(instance);
    const Selection brute_full = oracle::brute_force_max(instance, false);
    if (failure.empty() && p1.cardinality() != brute_full.cardinality())
      failure = "solve_p1 cardinality != full brute force";

    const P2Result p2 = solve_p2_optimal(instance);
    const Selection brute_ee = oracle::brute_force_max(instance, true);
    if (failure.empty() && p2.selection.cardinality() != brute_ee.cardinality())
      failure = "solve_p2_optimal cardinality != early-exit brute force";

    const Selection p2_sub = solve_p2_suboptimal(instance);
    if (failure.empty() && p2_sub.cardinality() > p2.selection.cardinality())
      failure = "suboptimal exceeded optimal";

    if (failure.empty()) {
      TreeSearchOptions no_bandwidth;
      no_bandwidth.ignore_bandwidth = true;
      const P2Result relaxed = solve_p2_optimal(instance, no_bandwidth);
      int greedy_max = 0;
      for (int n = 1; n <= instance.task_count(); ++n) {
        if (solve_p5_greedy(instance, n)) greedy_max = n;
      }
      if (relaxed.selection.cardinality() != greedy_max)
        failure = "bandwidth-free optimum != greedy maximum";
    }

    if (failure.empty()) {
      for (int n = 1; n <= instance.task_count() && failure.empty(); ++n) {
        const TreeSearchResult pruned = solve_p4_tree(instance, n, true);
        const TreeSearchResult unpruned = solve_p4_tree(instance, n, false);
        const oracle::ExhaustiveResult reference =
            oracle::exhaustive_tree_search(instance, n);
        if (pruned.selection.has_value() != reference.selection.has_value() ||
            unpruned.selection.has_value() != reference.selection.has_value())
          failure = "pruned/unpruned feasibility verdicts differ";
        else if (pruned.stats.nodes_visited > reference.stats.nodes_visited)
          failure = "pruned search visited more nodes than exhaustive";
      }
    }

    if (failure.empty()) {
      if (!p1.empty() && !check_feasible(p1, instance, false))
        failure = "solve_p1 selection fails check_feasible";
      else if (!p2.selection.empty() && !check_feasible(p2.selection, instance, true))
        failure = "solve_p2_optimal selection fails check_feasible";
      else if (!p2_sub.empty() && !check_feasible(p2_sub, instance, true))
        failure = "solve_p2_suboptimal selection fails check_feasible";
    }

    if (!failure.empty()) {
      write_text_file(options.failure_path, instance_to_json(instance));
      err << "certification failed at instance " << i << ": " << failure
          << "\nreproduction written to " << options.failure_path << "\n";
      return kExitCertify;
    }
  }
  out << "certified " << options.instances << " instances (K<=" << options.max_tasks
      << ", D<=" << options.max_depth << "): all solver/oracle checks passed\n";
  return kExitOk;
}

}  // namespace edgebatch
