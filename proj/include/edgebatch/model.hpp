#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace edgebatch {

/// Cell-wide constants: spectrum, noise floor and the slotted timeline.
/// Communication and computation slots default to the same duration T but
/// may be set independently.
struct SystemConfig {
  double total_bandwidth_hz = 2.0e7;  // B
  double noise_power_w = 1.0;         // N0
  double slot_duration_s = 0.25;      // T
  double comm_slot_s = 0.25;
  double comp_slot_s = 0.25;
  double bandwidth_tolerance = 1e-9;

  static SystemConfig make(double bandwidth_hz, double noise_w, double slot_s);
};

/// Throws std::domain_error on non-positive fields.
void validate(const SystemConfig& config);

/// One inference request. `snr` is the received linear SNR p*h^2/N0; loaders
/// accept either an explicit snr or a (channel_gain, tx_power) pair.
struct TaskRequest {
  std::int64_t id = 0;
  double snr = 0.0;
  std::int64_t feature_bits = 0;
  double deadline_s = 0.0;
  double waiting_s = 0.0;
  int exit_point = 1;  // 1..D
  std::optional<double> accuracy_req;

  static double snr_from_channel(double channel_gain, double tx_power_w,
                                 double noise_power_w);
};

/// Monotone non-decreasing batch-size -> seconds mapping, zero at batch 0.
/// Linear form is c0 + c1*n for n >= 1. Tables are sampled at integer batch
/// sizes, interpolated between samples and extrapolated with the last
/// segment's slope beyond the largest sample.
class BatchTimeFn {
 public:
  BatchTimeFn() = default;  // linear, identically zero

  static BatchTimeFn linear(double c0, double c1);
  static BatchTimeFn table(std::vector<std::pair<int, double>> samples);

  double operator()(int batch) const;

  bool is_linear() const { return linear_; }
  double linear_c0() const { return c0_; }
  double linear_c1() const { return c1_; }
  const std::vector<std::pair<int, double>>& samples() const { return samples_; }

  /// Slope governing growth for large batches (c1, or the last table
  /// segment's slope). Used by the asymptotic throughput bound.
  double tail_slope() const;

  /// Throws std::domain_error if the mapping decreases anywhere on
  /// [0, max_batch_checked] or is negative.
  void validate_monotone(int max_batch_checked) const;

 private:
  bool linear_ = true;
  double c0_ = 0.0;
  double c1_ = 0.0;
  std::vector<std::pair<int, double>> samples_;  // ascending batch
};

/// Per-block execution-time mappings f_1..f_D, the whole-network mapping f
/// (defaults to the sum of the blocks), and the accuracy reached at each
/// exit.
struct LatencyProfile {
  std::vector<BatchTimeFn> block_times;      // size D
  std::optional<BatchTimeFn> full_time_fn;   // overrides sum-of-blocks
  std::vector<double> accuracy_per_exit;     // strictly increasing, size D

  int depth() const { return static_cast<int>(block_times.size()); }
  double block_time(int depth_one_based, int batch) const;
  double full_time(int batch) const;
  /// Sum of f_1..f_exit at a common batch size, accumulated left to right.
  double prefix_time(int exit_depth, int batch) const;
};

void validate(const LatencyProfile& profile, int max_batch_checked = 64);

/// Ships the documented synthetic linear profile: f(1) ~= 50 ms and the
/// default 250 ms slot admits a full-depth batch of 20.
LatencyProfile make_default_profile(int depth = 3);

/// One epoch's scheduling problem with the derived per-task quantities.
struct Instance {
  SystemConfig config;
  LatencyProfile profile;
  std::vector<TaskRequest> tasks;
  std::vector<double> rho_min;           // aligned with tasks
  std::vector<double> latency_budget_s;  // aligned with tasks

  int task_count() const { return static_cast<int>(tasks.size()); }
  int depth() const { return profile.depth(); }
  /// Index of a task id; throws std::domain_error for unknown ids.
  int index_of(std::int64_t id) const;

  std::unordered_map<std::int64_t, int> id_index;
};

/// Validates config/profile/tasks (unique ids, exit points in range, ...)
/// and computes rho_min and latency budgets.
Instance make_instance(SystemConfig config, LatencyProfile profile,
                       std::vector<TaskRequest> tasks);

/// A scheduling decision: chosen tasks, their bandwidth fractions, the
/// per-depth split and block-wise batch sizes, and predicted compute times.
struct Selection {
  std::vector<std::int64_t> selected_ids;            // ascending
  std::vector<std::vector<std::int64_t>> per_depth;  // size D
  std::map<std::int64_t, double> bandwidth_fractions;
  std::vector<int> block_batch_sizes;                // size D
  std::map<std::int64_t, double> predicted_compute_s;

  int cardinality() const { return static_cast<int>(selected_ids.size()); }
  bool empty() const { return selected_ids.empty(); }
  double bandwidth_sum() const;
};

Selection make_empty_selection(const Instance& instance);
/// Full-network execution: every member's compute time is f(|S|).
Selection make_selection_full(const Instance& instance,
                              std::vector<std::int64_t> ids);
/// Early-exit execution: member k computes for prefix_d<=d_k f_d(n_d) with
/// the shrinking block-wise batch sizes of the chosen set.
Selection make_selection_ee(const Instance& instance,
                            std::vector<std::int64_t> ids);

/// Shared bandwidth comparator; every solver and oracle in this repo uses
/// this exact predicate so ties cannot diverge between them.
inline bool bandwidth_within_budget(double rho_sum, const SystemConfig& config) {
  return rho_sum <= 1.0 + config.bandwidth_tolerance;
}

/// Minimum bandwidth fraction needed to upload the feature vector within
/// one communication slot. May exceed 1 (task then unschedulable alone).
double min_bandwidth_fraction(const TaskRequest& task, const SystemConfig& config);

/// min(deadline - waiting - comm slot, comp slot); may be <= 0, meaning the
/// task cannot be scheduled in this epoch.
double latency_budget(const TaskRequest& task, const SystemConfig& config);

/// Block-wise batch sizes n_d = |{k : d_k >= d}| for d = 1..depth.
std::vector<int> block_batch_sizes(const std::vector<int>& exit_points, int depth);

/// Smallest exit whose accuracy reaches `accuracy`; nullopt if unattainable.
std::optional<int> exit_point_for_accuracy(double accuracy,
                                           const LatencyProfile& profile);

/// Task indices ascending by (rho_min, id) — the selection priority order
/// shared by every solver.
std::vector<int> tasks_by_rho(const Instance& instance);

/// Canonical bandwidth sum: rho_min folded in ascending (rho_min, id) order.
/// Every accept decision and check_feasible use this exact fold, so float
/// rounding cannot make a solver and the checker disagree at the budget
/// boundary.
double priority_rho_sum(const Instance& instance,
                        const std::vector<std::int64_t>& ids);

/// Canonical single-task latency test used by every solver and oracle:
/// f_depth(batch_at_depth) <= budget - time_before_depth, evaluated in this
/// exact floating-point form.
inline bool latency_step_ok(double block_time_at_depth, double budget,
                            double time_before_depth) {
  return block_time_at_depth <= budget - time_before_depth;
}

/// Independent verifier of the scheduling constraints, computed directly
/// from the definitions (no solver code on this path).
bool check_feasible(const Selection& selection, const Instance& instance,
                    bool early_exit);
bool check_feasible_ids(const std::vector<std::int64_t>& ids,
                        const Instance& instance, bool early_exit);

}  // namespace edgebatch
