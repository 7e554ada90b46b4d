#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "edgebatch/model.hpp"

namespace edgebatch {

/// Tasks partitioned by exit point; within each group, task indices are
/// sorted ascending by (rho_min, id) so "the v cheapest members" is a prefix.
struct ExitGroups {
  std::vector<std::vector<int>> by_depth;  // size D, instance task indices
};

ExitGroups make_exit_groups(const Instance& instance);

/// Node-visit accounting for one search (or an aggregate over searches).
struct SearchStats {
  std::int64_t nodes_visited = 0;
  std::int64_t nodes_fathomed_without_visit = 0;
  std::int64_t solutions_checked = 0;
  bool pruning_enabled = true;

  SearchStats& operator+=(const SearchStats& other) {
    nodes_visited += other.nodes_visited;
    nodes_fathomed_without_visit += other.nodes_fathomed_without_visit;
    solutions_checked += other.solutions_checked;
    return *this;
  }
};

/// A search-tree node: path[m-1] is the cardinality chosen from depth-m's
/// feasible subset. The root is the empty path.
struct SearchNode {
  std::vector<int> path;

  int depth() const { return static_cast<int>(path.size()); }
  int selected_count() const {
    int total = 0;
    for (int v : path) total += v;
    return total;
  }
};

enum class NodeKind {
  Solution,       // selected count reached n; bandwidth still to check
  ExhaustedLeaf,  // depth D with too few tasks: fathomed by definition
  Expandable,     // interior node with children to discover
};

struct VisitResult {
  NodeKind kind = NodeKind::Expandable;
  // Solution nodes
  std::vector<std::int64_t> task_ids;
  double bandwidth_sum = 0.0;
  bool bandwidth_ok = false;
  // Expandable nodes: children carry indices max_child_index..0, visited in
  // descending order; next_feasible_ids is the depth-(d+1) feasible subset
  // ascending by (rho_min, id).
  int max_child_index = -1;
  std::vector<std::int64_t> next_feasible_ids;
};

/// Classifies one node and discovers its children, recomputing the feasible
/// chain along the path from scratch.
VisitResult visit_node(const SearchNode& node, const Instance& instance,
                       const ExitGroups& groups, int target_count,
                       bool ignore_bandwidth = false);

/// Tasks meeting the tightened constraint sum_{d<=d_k} f_d(n) <= budget,
/// i.e. ignoring batch shrinkage. Ids ascending.
std::vector<std::int64_t> tightened_feasible_set(const Instance& instance,
                                                 int batch_size);

/// Best-shelf-packing loop over the tightened feasible sets. The result
/// satisfies the tightened constraints, hence also the true ones.
Selection solve_p2_suboptimal(const Instance& instance,
                              bool ignore_bandwidth = false);

/// Greedy depth-by-depth selection for the latency-only problem (bandwidth
/// ignored). Empty optional certifies infeasibility at this cardinality.
std::optional<Selection> solve_p5_greedy(const Instance& instance,
                                         int target_count);

struct TreeSearchOptions {
  bool pruning = true;
  /// Skip (without fathoming) subtrees whose accumulated bandwidth already
  /// exceeds the budget; never triggers sibling propagation.
  bool bandwidth_cutoff = true;
  bool ignore_bandwidth = false;
  std::int64_t node_cap = -1;  // < 0: unlimited
  /// Test hook: records the path of every node fathomed without a visit.
  std::vector<std::vector<int>>* fathomed_without_visit_log = nullptr;
};

struct TreeSearchResult {
  std::optional<Selection> selection;
  SearchStats stats;
  bool node_cap_hit = false;
};

/// Depth-first search over the cardinality tree for one target count,
/// largest child index first, with fathoming-based pruning.
TreeSearchResult solve_p4_tree(const Instance& instance, int target_count,
                               const TreeSearchOptions& options = {});
inline TreeSearchResult solve_p4_tree(const Instance& instance, int target_count,
                                      bool pruning) {
  TreeSearchOptions options;
  options.pruning = pruning;
  return solve_p4_tree(instance, target_count, options);
}

struct P2Result {
  Selection selection;
  SearchStats stats;
  bool node_cap_hit = false;
};

/// Sequential search n = 1, 2, ... nesting solve_p4_tree; stops at the first
/// infeasible cardinality and returns the last feasible selection.
P2Result solve_p2_optimal(const Instance& instance,
                          const TreeSearchOptions& options = {});

}  // namespace edgebatch
