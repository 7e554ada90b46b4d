#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgebatch/model.hpp"
#include "edgebatch/solver_ee.hpp"

namespace edgebatch {

enum class Policy { FullOptimal, EeSuboptimal, EeOptimal };

std::string policy_name(Policy policy);
std::optional<Policy> policy_from_name(const std::string& name);

struct UniformRange {
  double lo = 0.0;
  double hi = 0.0;
  double mean() const { return 0.5 * (lo + hi); }
};

/// One experiment configuration: arrival process, mark distributions, and
/// the system/profile under test.
struct Scenario {
  std::string scenario_id = "default";
  double arrival_rate = 100.0;  // tasks per second
  double duration_s = 30.0;
  std::uint64_t seed = 1;
  double avg_path_loss = 1e-3;
  double snr_db = 20.0;
  std::int64_t feature_bits = 80000;
  UniformRange deadline_dist{0.5, 2.0};
  /// Exit-point weights over 1..D; ignored when accuracy_dist is set.
  std::vector<double> exit_weights;
  /// When set, per-task accuracy requirements are drawn uniformly and mapped
  /// through the profile's accuracy table.
  std::optional<UniformRange> accuracy_dist;
  /// Unattainable accuracy draws: clamp to the deepest exit, or generate the
  /// task as immediately dropped.
  bool clamp_unattainable_accuracy = true;
  bool early_exit = true;
  SystemConfig config = SystemConfig::make(2.0e7, 1.0, 0.25);
  LatencyProfile profile = make_default_profile(3);
};

void validate(const Scenario& scenario);

struct ArrivingTask {
  TaskRequest request;  // waiting_s filled in per epoch by the simulator
  double arrival_s = 0.0;
  bool unattainable = false;  // accuracy requirement beyond the deepest exit
};

/// Poisson arrivals with i.i.d. marks, fully determined by the scenario
/// seed via named per-task streams.
std::vector<ArrivingTask> generate_workload(const Scenario& scenario);

struct SimMetrics {
  std::int64_t generated = 0;
  std::int64_t completed = 0;
  std::int64_t dropped = 0;
  double completion_rate = 0.0;
  std::vector<double> latencies;  // end-to-end, completed tasks only
  SearchStats search;             // aggregate over epochs (tree policies)

  double mean_latency() const;
};

/// Epoch-driven simulation: pending tasks are re-solved every communication
/// slot, selected tasks upload next slot and compute in the overlapping
/// computation slot. Overloads taking an explicit workload run the same
/// logic on injected traces.
SimMetrics run_policy_sim(const Scenario& scenario, Policy policy);
SimMetrics run_policy_sim(const Scenario& scenario, Policy policy,
                          const std::vector<ArrivingTask>& workload);

/// FIFO single-task service with full bandwidth; no batching.
SimMetrics run_baseline_single_instance(const Scenario& scenario);
SimMetrics run_baseline_single_instance(const Scenario& scenario,
                                        const std::vector<ArrivingTask>& workload);

/// Fixed batch size with a timeout on the oldest buffered task.
SimMetrics run_baseline_static_batching(const Scenario& scenario,
                                        int batch_size, double timeout_s);
SimMetrics run_baseline_static_batching(const Scenario& scenario,
                                        int batch_size, double timeout_s,
                                        const std::vector<ArrivingTask>& workload);

struct StaticParams {
  int batch_size = 1;
  double timeout_s = 0.1;
};

/// Grid search for the static-batching parameters at 50 tasks/s; ties go to
/// the smaller batch size, then the smaller timeout.
StaticParams optimize_static_params(const Scenario& base,
                                    const std::vector<int>& batch_grid,
                                    const std::vector<double>& timeout_grid,
                                    const std::vector<std::uint64_t>& seeds);

enum class BoundVariant { Asymptotic, SlotLimited };

/// Tasks-per-second ceiling from the full-network execution-time mapping:
/// asymptotic = lim n/f(n); slot-limited = n_max/T with n_max the largest
/// batch finishing within the slot.
double throughput_upper_bound(const LatencyProfile& profile, double slot_s,
                              BoundVariant variant);

}  // namespace edgebatch
