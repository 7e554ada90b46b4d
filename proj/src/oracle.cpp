#include "edgebatch/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace edgebatch::oracle {

Selection brute_force_max(const Instance& instance, bool early_exit,
                          int max_tasks_guard) {
  const int task_count = instance.task_count();
  if (task_count > max_tasks_guard)
    throw std::domain_error("brute_force_max: instance exceeds the task guard");
  if (task_count == 0) return make_empty_selection(instance);

  // Stable bit -> task mapping in ascending id order so the lexicographic
  // winner does not depend on input ordering.
  std::vector<int> by_id(static_cast<std::size_t>(task_count));
  for (int i = 0; i < task_count; ++i) by_id[static_cast<std::size_t>(i)] = i;
  std::sort(by_id.begin(), by_id.end(), [&](int a, int b) {
    return instance.tasks[static_cast<std::size_t>(a)].id <
           instance.tasks[static_cast<std::size_t>(b)].id;
  });

  std::vector<std::int64_t> best_ids;  // empty set is always feasible
  const std::uint64_t subset_count = std::uint64_t{1} << task_count;
  std::uint64_t gray = 0;
  double rho_sum = 0.0;
  int cardinality = 0;
  std::vector<std::int64_t> ids;
  ids.reserve(static_cast<std::size_t>(task_count));
  for (std::uint64_t i = 1; i < subset_count; ++i) {
    // Gray-code step: exactly one task enters or leaves the subset.
    const std::uint64_t next = i ^ (i >> 1);
    const std::uint64_t flipped = next ^ gray;
    const int bit = std::countr_zero(flipped);
    const int idx = by_id[static_cast<std::size_t>(bit)];
    if (next & flipped) {
      rho_sum += instance.rho_min[static_cast<std::size_t>(idx)];
      ++cardinality;
    } else {
      rho_sum -= instance.rho_min[static_cast<std::size_t>(idx)];
      --cardinality;
    }
    gray = next;
    if ((i & 0xFFF) == 0) {
      // Resync the incremental sum so float drift stays far below the slack.
      rho_sum = 0.0;
      for (int b = 0; b < task_count; ++b) {
        if (gray & (std::uint64_t{1} << b))
          rho_sum += instance.rho_min[static_cast<std::size_t>(by_id[static_cast<std::size_t>(b)])];
      }
    }
    if (cardinality < static_cast<int>(best_ids.size())) continue;
    // Screen with slack only; the authoritative filter below recomputes.
    if (rho_sum > 1.0 + instance.config.bandwidth_tolerance + 1e-6) continue;
    ids.clear();
    for (int b = 0; b < task_count; ++b) {
      if (gray & (std::uint64_t{1} << b))
        ids.push_back(instance.tasks[static_cast<std::size_t>(by_id[static_cast<std::size_t>(b)])].id);
    }
    if (!check_feasible_ids(ids, instance, early_exit)) continue;
    if (cardinality > static_cast<int>(best_ids.size()) ||
        (cardinality == static_cast<int>(best_ids.size()) && ids < best_ids)) {
      best_ids = ids;
    }
  }
  return early_exit ? make_selection_ee(instance, std::move(best_ids))
                    : make_selection_full(instance, std::move(best_ids));
}

namespace {

struct ExhaustiveContext {
  const Instance& instance;
  std::vector<std::vector<int>> groups{};  // task indices per depth, rho order
  int target = 0;
  std::int64_t node_cap = 0;
  SearchStats stats{};
  bool capped = false;
};

std::optional<Selection> visit_exhaustive(ExhaustiveContext& ctx, int node_depth,
                                          int count, double time_before,
                                          std::vector<std::int64_t>& chosen) {
  ++ctx.stats.nodes_visited;
  if (ctx.node_cap >= 0 && ctx.stats.nodes_visited > ctx.node_cap) {
    ctx.capped = true;
    return std::nullopt;
  }
  if (count == ctx.target) {
    ++ctx.stats.solutions_checked;
    if (bandwidth_within_budget(priority_rho_sum(ctx.instance, chosen),
                                ctx.instance.config))
      return make_selection_ee(ctx.instance, chosen);
    return std::nullopt;
  }
  if (node_depth == ctx.instance.depth()) return std::nullopt;

  const int remaining = ctx.target - count;
  const double step = ctx.instance.profile.block_time(node_depth + 1, remaining);
  std::vector<int> feasible;
  for (int idx : ctx.groups[static_cast<std::size_t>(node_depth)]) {
    if (latency_step_ok(step,
                        ctx.instance.latency_budget_s[static_cast<std::size_t>(idx)],
                        time_before))
      feasible.push_back(idx);
  }
  const int max_child = std::min(remaining, static_cast<int>(feasible.size()));
  for (int child = max_child; child >= 0; --child) {
    for (int i = 0; i < child; ++i)
      chosen.push_back(
          ctx.instance.tasks[static_cast<std::size_t>(feasible[static_cast<std::size_t>(i)])].id);
    auto found = visit_exhaustive(ctx, node_depth + 1, count + child,
                                  time_before + step, chosen);
    chosen.resize(chosen.size() - static_cast<std::size_t>(child));
    if (found) return found;
    if (ctx.capped) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

ExhaustiveResult exhaustive_tree_search(const Instance& instance,
                                        int target_count,
                                        std::int64_t node_cap) {
  if (target_count < 1 || target_count > instance.task_count())
    throw std::domain_error("target count must lie in 1..K");
  ExhaustiveContext ctx{.instance = instance};
  ctx.groups.assign(static_cast<std::size_t>(instance.depth()), {});
  for (int idx : tasks_by_rho(instance)) {
    const int exit = instance.tasks[static_cast<std::size_t>(idx)].exit_point;
    ctx.groups[static_cast<std::size_t>(exit) - 1].push_back(idx);
  }
  ctx.target = target_count;
  ctx.node_cap = node_cap;
  ctx.stats.pruning_enabled = false;

  std::vector<std::int64_t> chosen;
  ExhaustiveResult result;
  result.selection = visit_exhaustive(ctx, 0, 0, 0.0, chosen);
  result.stats = ctx.stats;
  result.node_cap_hit = ctx.capped;
  return result;
}

UnprunedP2Result solve_p2_unpruned(const Instance& instance,
                                   std::int64_t node_cap) {
  UnprunedP2Result result;
  result.selection = make_empty_selection(instance);
  result.stats.pruning_enabled = false;
  for (int n = 1; n <= instance.task_count(); ++n) {
    const std::int64_t budget =
        node_cap < 0 ? -1 : node_cap - result.stats.nodes_visited;
    ExhaustiveResult search = exhaustive_tree_search(instance, n, budget);
    result.stats += search.stats;
    if (search.node_cap_hit) {
      result.node_cap_hit = true;
      break;
    }
    if (!search.selection) break;
    result.selection = std::move(*search.selection);
  }
  return result;
}

}  // namespace edgebatch::oracle
