#pragma once

#include <cstdint>
#include <optional>

#include "edgebatch/model.hpp"
#include "edgebatch/solver_ee.hpp"

namespace edgebatch::oracle {

/// Exhaustive subset enumeration filtered by check_feasible. Returns a
/// maximum-cardinality feasible subset, the lexicographically smallest
/// id-set among winners. Refuses instances above the task guard.
Selection brute_force_max(const Instance& instance, bool early_exit,
                          int max_tasks_guard = 20);

struct ExhaustiveResult {
  std::optional<Selection> selection;
  SearchStats stats;
  bool node_cap_hit = false;
};

inline constexpr std::int64_t kDefaultNodeCap = 2'000'000;

/// Plain depth-first search over the same cardinality tree and in the same
/// child order as solve_p4_tree, but with sibling propagation and the
/// bandwidth cutoff disabled. Written independently of the solver.
ExhaustiveResult exhaustive_tree_search(const Instance& instance,
                                        int target_count,
                                        std::int64_t node_cap = kDefaultNodeCap);

struct UnprunedP2Result {
  Selection selection;
  SearchStats stats;
  bool node_cap_hit = false;
};

/// Sequential n = 1, 2, ... loop over exhaustive_tree_search, mirroring
/// solve_p2_optimal for 1:1 node-count comparisons.
UnprunedP2Result solve_p2_unpruned(const Instance& instance,
                                   std::int64_t node_cap = kDefaultNodeCap);

}  // namespace edgebatch::oracle
