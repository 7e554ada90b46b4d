#include "edgebatch/solver_ee.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgebatch {

namespace {

void check_target(const Instance& instance, int target_count) {
  if (target_count < 1 || target_count > instance.task_count())
    throw std::domain_error("target count must lie in 1..K");
}

double rho_of(const Instance& instance, int idx) {
  return instance.rho_min[static_cast<std::size_t>(idx)];
}

double budget_of(const Instance& instance, int idx) {
  return instance.latency_budget_s[static_cast<std::size_t>(idx)];
}

// F_depth under the canonical latency test, preserving the group's
// (rho_min, id) order.
std::vector<int> feasible_in_group(const Instance& instance,
                                   const std::vector<int>& group, double step,
                                   double time_before) {
  std::vector<int> feasible;
  feasible.reserve(group.size());
  for (int idx : group) {
    if (latency_step_ok(step, budget_of(instance, idx), time_before))
      feasible.push_back(idx);
  }
  return feasible;
}

}  // namespace

ExitGroups make_exit_groups(const Instance& instance) {
  ExitGroups groups;
  groups.by_depth.assign(static_cast<std::size_t>(instance.depth()), {});
  for (int idx : tasks_by_rho(instance)) {
    const int exit = instance.tasks[static_cast<std::size_t>(idx)].exit_point;
    groups.by_depth[static_cast<std::size_t>(exit) - 1].push_back(idx);
  }
  return groups;
}

std::vector<std::int64_t> tightened_feasible_set(const Instance& instance,
                                                 int batch_size) {
  check_target(instance, batch_size);
  const int depth = instance.depth();
  // prefix[d] = f_1(n) + ... + f_d(n), left to right
  std::vector<double> prefix(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int d = 1; d <= depth; ++d) {
    prefix[static_cast<std::size_t>(d)] =
        prefix[static_cast<std::size_t>(d) - 1] +
        instance.profile.block_time(d, batch_size);
  }
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < instance.tasks.size(); ++i) {
    const int exit = instance.tasks[i].exit_point;
    if (prefix[static_cast<std::size_t>(exit)] <= instance.latency_budget_s[i])
      ids.push_back(instance.tasks[i].id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Selection solve_p2_suboptimal(const Instance& instance, bool ignore_bandwidth) {
  const auto order = tasks_by_rho(instance);
  const int depth = instance.depth();
  std::optional<std::vector<std::int64_t>> best;
  for (int n = 1; n <= instance.task_count(); ++n) {
    std::vector<double> prefix(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int d = 1; d <= depth; ++d) {
      prefix[static_cast<std::size_t>(d)] =
          prefix[static_cast<std::size_t>(d) - 1] +
          instance.profile.block_time(d, n);
    }
    std::vector<std::int64_t> ids;
    ids.reserve(static_cast<std::size_t>(n));
    double rho_sum = 0.0;
    for (int idx : order) {
      const int exit = instance.tasks[static_cast<std::size_t>(idx)].exit_point;
      if (prefix[static_cast<std::size_t>(exit)] <= budget_of(instance, idx)) {
        ids.push_back(instance.tasks[static_cast<std::size_t>(idx)].id);
        rho_sum += rho_of(instance, idx);
        if (static_cast<int>(ids.size()) == n) break;
      }
    }
    if (static_cast<int>(ids.size()) < n) break;
    if (!ignore_bandwidth && !bandwidth_within_budget(rho_sum, instance.config))
      break;
    best = std::move(ids);
  }
  if (!best) return make_empty_selection(instance);
  return make_selection_ee(instance, std::move(*best));
}

std::optional<Selection> solve_p5_greedy(const Instance& instance,
                                         int target_count) {
  check_target(instance, target_count);
  const ExitGroups groups = make_exit_groups(instance);
  const int depth = instance.depth();

  std::vector<std::int64_t> chosen;
  int selected_before = 0;
  double time_before = 0.0;
  for (int a = 1; a <= depth; ++a) {
    const int remaining = target_count - selected_before;
    const double step = instance.profile.block_time(a, remaining);
    const std::vector<int> feasible = feasible_in_group(
        instance, groups.by_depth[static_cast<std::size_t>(a) - 1], step,
        time_before);
    if (static_cast<int>(feasible.size()) >= remaining) {
      for (int i = 0; i < remaining; ++i)
        chosen.push_back(instance.tasks[static_cast<std::size_t>(feasible[static_cast<std::size_t>(i)])].id);
      return make_selection_ee(instance, std::move(chosen));
    }
    for (int idx : feasible)
      chosen.push_back(instance.tasks[static_cast<std::size_t>(idx)].id);
    selected_before += static_cast<int>(feasible.size());
    time_before += step;
  }
  return std::nullopt;
}

VisitResult visit_node(const SearchNode& node, const Instance& instance,
                       const ExitGroups& groups, int target_count,
                       bool ignore_bandwidth) {
  check_target(instance, target_count);
  const int depth = instance.depth();
  if (node.depth() > depth)
    throw std::domain_error("node path deeper than the profile");

  VisitResult result;
  int selected_before = 0;
  double time_before = 0.0;
  std::vector<std::int64_t> chosen;
  for (int m = 1; m <= node.depth(); ++m) {
    const int want = node.path[static_cast<std::size_t>(m) - 1];
    const int batch = target_count - selected_before;
    const double step = instance.profile.block_time(m, batch);
    const std::vector<int> feasible = feasible_in_group(
        instance, groups.by_depth[static_cast<std::size_t>(m) - 1], step,
        time_before);
    if (want < 0 || want > static_cast<int>(feasible.size()))
      throw std::domain_error("node path inconsistent with the feasible chain");
    for (int i = 0; i < want; ++i) {
      const int idx = feasible[static_cast<std::size_t>(i)];
      chosen.push_back(instance.tasks[static_cast<std::size_t>(idx)].id);
    }
    selected_before += want;
    time_before += step;
  }

  if (selected_before == target_count) {
    result.kind = NodeKind::Solution;
    result.bandwidth_sum = priority_rho_sum(instance, chosen);
    result.task_ids = std::move(chosen);
    result.bandwidth_ok = ignore_bandwidth ||
                          bandwidth_within_budget(result.bandwidth_sum,
                                                  instance.config);
    return result;
  }
  if (node.depth() == depth) {
    result.kind = NodeKind::ExhaustedLeaf;
    return result;
  }

  result.kind = NodeKind::Expandable;
  const int remaining = target_count - selected_before;
  const int next_depth = node.depth() + 1;
  const double step = instance.profile.block_time(next_depth, remaining);
  const std::vector<int> feasible = feasible_in_group(
      instance, groups.by_depth[static_cast<std::size_t>(next_depth) - 1], step,
      time_before);
  result.max_child_index = std::min(remaining, static_cast<int>(feasible.size()));
  result.next_feasible_ids.reserve(feasible.size());
  for (int idx : feasible)
    result.next_feasible_ids.push_back(instance.tasks[static_cast<std::size_t>(idx)].id);
  return result;
}

namespace {

// One visited, expandable node on the DFS stack.
struct Frame {
  int count = 0;           // tasks selected along the path to this node
  double time_before = 0;  // canonical fold of f_d over the path
  double rho_sum = 0;      // bandwidth accumulated along the path
  double child_step = 0;   // f_{depth+1} at this node's remaining count
  std::vector<int> feasible;       // F_{depth+1}, task indices, rho-ascending
  std::vector<double> rho_prefix;  // rho_prefix[j] = rho of the j cheapest
  int max_child = 0;
  int next_child = 0;
  bool any_child_not_fathomed = false;
};

Frame make_frame(const Instance& instance, const ExitGroups& groups,
                 int target_count, int node_depth, int count,
                 double time_before, double rho_sum) {
  Frame frame;
  frame.count = count;
  frame.time_before = time_before;
  frame.rho_sum = rho_sum;
  const int remaining = target_count - count;
  const double step = instance.profile.block_time(node_depth + 1, remaining);
  frame.child_step = step;
  frame.feasible = feasible_in_group(
      instance, groups.by_depth[static_cast<std::size_t>(node_depth)], step,
      time_before);
  frame.rho_prefix.assign(frame.feasible.size() + 1, 0.0);
  for (std::size_t i = 0; i < frame.feasible.size(); ++i) {
    frame.rho_prefix[i + 1] =
        frame.rho_prefix[i] +
        instance.rho_min[static_cast<std::size_t>(frame.feasible[i])];
  }
  frame.max_child = std::min(remaining, static_cast<int>(frame.feasible.size()));
  frame.next_child = frame.max_child;
  return frame;
}

}  // namespace

TreeSearchResult solve_p4_tree(const Instance& instance, int target_count,
                               const TreeSearchOptions& options) {
  check_target(instance, target_count);
  const ExitGroups groups = make_exit_groups(instance);
  const int depth = instance.depth();

  TreeSearchResult result;
  result.stats.pruning_enabled = options.pruning;

  auto visit_counted = [&]() -> bool {  // false when the cap is hit
    ++result.stats.nodes_visited;
    return options.node_cap < 0 || result.stats.nodes_visited <= options.node_cap;
  };

  auto log_skipped = [&](const std::vector<int>& path, int child) {
    if (!options.fathomed_without_visit_log) return;
    std::vector<int> skipped = path;
    skipped.push_back(child);
    options.fathomed_without_visit_log->push_back(std::move(skipped));
  };

  // Visit the root.
  if (!visit_counted()) {
    result.node_cap_hit = true;
    return result;
  }
  std::vector<Frame> stack;
  std::vector<int> path;  // child index chosen at each stacked frame
  stack.push_back(make_frame(instance, groups, target_count, 0, 0, 0.0, 0.0));

  while (!stack.empty()) {
    Frame& frame = stack.back();
    const int frame_depth = static_cast<int>(stack.size()) - 1;

    if (frame.next_child < 0) {
      // Children exhausted: resolve this node's fathoming and backtrack.
      const bool fathomed = !frame.any_child_not_fathomed;
      stack.pop_back();
      if (stack.empty()) break;
      if (!path.empty()) path.pop_back();
      Frame& parent = stack.back();
      if (fathomed) {
        if (options.pruning && parent.next_child >= 0) {
          // Sibling propagation: a fathomed node fathoms every lower-index
          // sibling, so they are skipped without a visit.
          result.stats.nodes_fathomed_without_visit += parent.next_child + 1;
          if (options.fathomed_without_visit_log) {
            for (int child = parent.next_child; child >= 0; --child)
              log_skipped(path, child);
          }
          parent.next_child = -1;
        }
      } else {
        parent.any_child_not_fathomed = true;
      }
      continue;
    }

    const int child = frame.next_child--;
    if (!visit_counted()) {
      result.node_cap_hit = true;
      return result;
    }
    const int child_count = frame.count + child;
    const double child_rho = frame.rho_sum + frame.rho_prefix[static_cast<std::size_t>(child)];

    if (child_count == target_count) {
      // latency-complete candidate; only the bandwidth budget is left
      ++result.stats.solutions_checked;
      std::vector<std::int64_t> ids;
      for (std::size_t level = 0; level < stack.size(); ++level) {
        const Frame& f = stack[level];
        const int take = (level + 1 < stack.size()) ? path[level] : child;
        for (int i = 0; i < take; ++i) {
          ids.push_back(
              instance.tasks[static_cast<std::size_t>(f.feasible[static_cast<std::size_t>(i)])].id);
        }
      }
      if (options.ignore_bandwidth ||
          bandwidth_within_budget(priority_rho_sum(instance, ids),
                                  instance.config)) {
        result.selection = make_selection_ee(instance, std::move(ids));
        return result;
      }
      // a bandwidth failure does not fathom a latency-feasible leaf
      frame.any_child_not_fathomed = true;
      continue;
    }

    if (frame_depth + 1 == depth) {
      // leaf at maximum depth short of the target count: fathomed
      if (options.pruning && frame.next_child >= 0) {
        result.stats.nodes_fathomed_without_visit += frame.next_child + 1;
        if (options.fathomed_without_visit_log) {
          for (int sibling = frame.next_child; sibling >= 0; --sibling)
            log_skipped(path, sibling);
        }
        frame.next_child = -1;
      }
      continue;
    }

    if (options.bandwidth_cutoff && !options.ignore_bandwidth &&
        child_rho > 1.0 + instance.config.bandwidth_tolerance + 1e-6) {
      // dead on bandwidth alone; skip the subtree but do not fathom it
      // (its leaves may still be latency-feasible, so no sibling propagation).
      // The slack absorbs any fold-order difference from the canonical sum,
      // so a skipped subtree is always genuinely over budget.
      frame.any_child_not_fathomed = true;
      continue;
    }

    path.push_back(child);
    const double child_time = frame.time_before + frame.child_step;
    stack.push_back(make_frame(instance, groups, target_count, frame_depth + 1,
                               child_count, child_time, child_rho));
  }

  return result;
}

P2Result solve_p2_optimal(const Instance& instance,
                          const TreeSearchOptions& options) {
  P2Result result;
  result.selection = make_empty_selection(instance);
  result.stats.pruning_enabled = options.pruning;
  for (int n = 1; n <= instance.task_count(); ++n) {
    TreeSearchResult search = solve_p4_tree(instance, n, options);
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

}  // namespace edgebatch
