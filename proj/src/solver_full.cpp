#include "edgebatch/solver_full.hpp"

#include <algorithm>

namespace edgebatch {

namespace {

// Picks the batch_size cheapest feasible tasks in one pass over the sorted
// order; nullopt when fewer than batch_size tasks clear the threshold.
std::optional<std::pair<std::vector<std::int64_t>, double>> pick_cheapest(
    const Instance& instance, const std::vector<int>& order, int batch_size) {
  const double threshold = instance.profile.full_time(batch_size);
  std::vector<std::int64_t> ids;
  ids.reserve(static_cast<std::size_t>(batch_size));
  double rho_sum = 0.0;
  for (int idx : order) {
    if (threshold <= instance.latency_budget_s[static_cast<std::size_t>(idx)]) {
      ids.push_back(instance.tasks[static_cast<std::size_t>(idx)].id);
      rho_sum += instance.rho_min[static_cast<std::size_t>(idx)];
      if (static_cast<int>(ids.size()) == batch_size) return std::pair{ids, rho_sum};
    }
  }
  return std::nullopt;
}

}  // namespace

FeasibleSet feasible_set(const Instance& instance, int batch_size) {
  FeasibleSet result;
  result.batch_size = batch_size;
  const double threshold = instance.profile.full_time(batch_size);
  for (int idx : tasks_by_rho(instance)) {
    if (threshold <= instance.latency_budget_s[static_cast<std::size_t>(idx)])
      result.members.push_back(instance.tasks[static_cast<std::size_t>(idx)].id);
  }
  return result;
}

std::optional<Selection> solve_p3(const Instance& instance, int batch_size,
                                  bool ignore_bandwidth) {
  const auto order = tasks_by_rho(instance);
  auto picked = pick_cheapest(instance, order, batch_size);
  if (!picked) return std::nullopt;
  if (!ignore_bandwidth && !bandwidth_within_budget(picked->second, instance.config))
    return std::nullopt;
  return make_selection_full(instance, std::move(picked->first));
}

Selection solve_p1(const Instance& instance, bool ignore_bandwidth) {
  const auto order = tasks_by_rho(instance);
  std::optional<std::vector<std::int64_t>> best;
  for (int n = 1; n <= instance.task_count(); ++n) {
    auto picked = pick_cheapest(instance, order, n);
    if (!picked) break;
    if (!ignore_bandwidth && !bandwidth_within_budget(picked->second, instance.config))
      break;
    best = std::move(picked->first);
  }
  if (!best) return make_empty_selection(instance);
  return make_selection_full(instance, std::move(*best));
}

}  // namespace edgebatch
