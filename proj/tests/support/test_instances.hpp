#pragma once

// Builders for hand-crafted scheduling problems where the derived per-task
// quantities (rho_min, latency budget) must equal exact doubles, so boundary
// comparisons in tests behave as written.

#include <vector>

#include "edgebatch/model.hpp"

namespace edgebatch::test_support {

struct TaskSpec {
  std::int64_t id = 0;
  double budget = 0.0;  // latency budget, set exactly
  double rho = 0.0;     // minimum bandwidth fraction, set exactly
  int exit = 1;
};

inline Instance explicit_instance(LatencyProfile profile,
                                  const std::vector<TaskSpec>& specs,
                                  double slot = 0.5) {
  SystemConfig config = SystemConfig::make(2.0e7, 1.0, slot);
  std::vector<TaskRequest> tasks;
  tasks.reserve(specs.size());
  for (const TaskSpec& spec : specs) {
    TaskRequest task;
    task.id = spec.id;
    task.snr = 1.0;
    task.feature_bits = 1000;
    // back-filled for readability only; the derived fields are overwritten
    task.deadline_s = std::max(spec.budget, 0.0) + slot + 1.0;
    task.waiting_s = 1.0;
    task.exit_point = spec.exit;
    tasks.push_back(task);
  }
  Instance instance = make_instance(config, std::move(profile), std::move(tasks));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    instance.rho_min[i] = specs[i].rho;
    instance.latency_budget_s[i] = specs[i].budget;
  }
  return instance;
}

/// The four-task worked problem in exactly representable (dyadic) values:
/// two exit groups, f_1 = f_2 = 0.0625 n, budgets {a,b,c,d} =
/// {0.25, 0.125, 0.3125, 0.5}, rho {0.5, 0.2, 0.4, 0.3}. Boundary ties
/// (f_2(2) equal to the remaining budget of c under a 3-batch) are exact.
inline Instance dyadic_four_task_instance() {
  LatencyProfile profile;
  profile.block_times = {BatchTimeFn::linear(0.0, 0.0625),
                         BatchTimeFn::linear(0.0, 0.0625)};
  profile.accuracy_per_exit = {0.6, 0.7};
  return explicit_instance(std::move(profile),
                           {{1, 0.25, 0.5, 1},
                            {2, 0.125, 0.2, 1},
                            {3, 0.3125, 0.4, 2},
                            {4, 0.5, 0.3, 2}});
}

/// Same structure with the literal decimal constants; boundary ties are not
/// representable here, so tests on this instance assert only
/// rounding-robust outcomes.
inline Instance literal_four_task_instance() {
  LatencyProfile profile;
  profile.block_times = {BatchTimeFn::linear(0.0, 0.05),
                         BatchTimeFn::linear(0.0, 0.05)};
  profile.accuracy_per_exit = {0.6, 0.7};
  return explicit_instance(std::move(profile),
                           {{1, 0.2, 0.5, 1},
                            {2, 0.1, 0.2, 1},
                            {3, 0.25, 0.4, 2},
                            {4, 0.4, 0.3, 2}});
}

}  // namespace edgebatch::test_support
