#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edgebatch/instance_gen.hpp"
#include "edgebatch/oracle.hpp"
#include "edgebatch/rng.hpp"
#include "edgebatch/solver_ee.hpp"
#include "edgebatch/solver_full.hpp"
#include "support/test_instances.hpp"

using namespace edgebatch;
using test_support::dyadic_four_task_instance;
using test_support::explicit_instance;

TEST_CASE("brute force handles the degenerate cases") {
  LatencyProfile profile;
  profile.block_times = {BatchTimeFn::linear(0.0, 0.05)};
  profile.accuracy_per_exit = {0.749};

  Instance empty = explicit_instance(profile, {});
  CHECK(oracle::brute_force_max(empty, false).empty());
  CHECK(oracle::brute_force_max(empty, true).empty());

  Instance overweight = explicit_instance(profile, {{1, 0.5, 1.5, 1}});
  CHECK(oracle::brute_force_max(overweight, false).empty());
}

TEST_CASE("brute force solves the worked four-task problem") {
  Instance instance = dyadic_four_task_instance();
  const Selection best = oracle::brute_force_max(instance, true);
  CHECK(best.cardinality() == 2);
  CHECK(best.selected_ids == std::vector<std::int64_t>{1, 2});  // lexicographic winner
}

TEST_CASE("brute force refuses instances above the guard") {
  RngStream rng(307, "oracle-guard");
  RandomInstanceParams params;
  params.task_count = 21;
  Instance big = random_instance(rng, params);
  CHECK_THROWS_AS(oracle::brute_force_max(big, true), std::domain_error);
  CHECK_NOTHROW(oracle::brute_force_max(big, true, 21));
}

TEST_CASE("brute force winners pass the independent checker and bound solvers") {
  RngStream rng(311, "oracle-bound");
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstanceParams params;
    params.task_count = 1 + static_cast<int>(rng.next_below(9));
    params.depth = 2 + static_cast<int>(rng.next_below(3));
    Instance instance = random_instance(rng, params);

    const Selection ee = oracle::brute_force_max(instance, true);
    CHECK(check_feasible(ee, instance, true));
    CHECK(ee.cardinality() >= solve_p2_optimal(instance).selection.cardinality());
    CHECK(ee.cardinality() >= solve_p2_suboptimal(instance).cardinality());

    const Selection full = oracle::brute_force_max(instance, false);
    CHECK(check_feasible(full, instance, false));
    CHECK(full.cardinality() >= solve_p1(instance).cardinality());
  }
}

TEST_CASE("lexicographically smallest winner among cardinality ties") {
  LatencyProfile profile;
  profile.block_times = {BatchTimeFn::linear(0.0, 0.0625)};
  profile.accuracy_per_exit = {0.749};
  // both {1,9} and {2,3} are feasible 2-sets; {1,9} sorts first
  Instance instance = explicit_instance(profile, {{9, 0.5, 0.4, 1},
                                                  {2, 0.5, 0.4, 1},
                                                  {3, 0.5, 0.4, 1},
                                                  {1, 0.5, 0.4, 1}});
  const Selection best = oracle::brute_force_max(instance, false);
  CHECK(best.cardinality() == 2);
  CHECK(best.selected_ids == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("exhaustive search matches the worked-tree hand trace") {
  Instance instance = dyadic_four_task_instance();

  const oracle::ExhaustiveResult infeasible =
      oracle::exhaustive_tree_search(instance, 3);
  CHECK_FALSE(infeasible.selection.has_value());
  CHECK(infeasible.stats.nodes_visited == 8);  // visits the pruned-away nodes too
  CHECK_FALSE(infeasible.stats.pruning_enabled);

  const TreeSearchResult pruned = solve_p4_tree(instance, 3);
  CHECK(pruned.stats.nodes_visited == 6);

  // greedy-success case: no pruning opportunity, identical visit counts
  const oracle::ExhaustiveResult feasible =
      oracle::exhaustive_tree_search(instance, 2);
  REQUIRE(feasible.selection.has_value());
  CHECK(feasible.stats.nodes_visited ==
        solve_p4_tree(instance, 2).stats.nodes_visited);
  CHECK(feasible.selection->selected_ids == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("exhaustive search honours the node cap") {
  RngStream rng(313, "oracle-cap");
  Instance instance = benchmark_instance(rng, 24, 4);
  // a 20-task schedule needs at least five visits (root plus four levels)
  const oracle::ExhaustiveResult capped =
      oracle::exhaustive_tree_search(instance, 20, 3);
  CHECK(capped.node_cap_hit);
  CHECK(capped.stats.nodes_visited >= 3);  // partial stats survive
}

TEST_CASE("pruned and exhaustive searches agree on feasibility everywhere") {
  RngStream rng(317, "oracle-agree");
  for (int trial = 0; trial < 60; ++trial) {
    RandomInstanceParams params;
    params.task_count = 1 + static_cast<int>(rng.next_below(8));
    params.depth = 2 + static_cast<int>(rng.next_below(3));
    Instance instance = random_instance(rng, params);
    for (int n = 1; n <= instance.task_count(); ++n) {
      const TreeSearchResult pruned = solve_p4_tree(instance, n);
      const oracle::ExhaustiveResult reference =
          oracle::exhaustive_tree_search(instance, n);
      CHECK(pruned.selection.has_value() == reference.selection.has_value());
      CHECK(pruned.stats.nodes_visited <= reference.stats.nodes_visited);
    }
  }
}

TEST_CASE("unpruned sequential loop mirrors the optimal solver's verdicts") {
  RngStream rng(331, "oracle-loop");
  for (int trial = 0; trial < 40; ++trial) {
    RandomInstanceParams params;
    params.task_count = 1 + static_cast<int>(rng.next_below(8));
    params.depth = 2 + static_cast<int>(rng.next_below(2));
    Instance instance = random_instance(rng, params);
    const P2Result pruned = solve_p2_optimal(instance);
    const oracle::UnprunedP2Result unpruned = oracle::solve_p2_unpruned(instance);
    REQUIRE_FALSE(unpruned.node_cap_hit);
    CHECK(pruned.selection.cardinality() == unpruned.selection.cardinality());
    CHECK(pruned.stats.nodes_visited <= unpruned.stats.nodes_visited);
  }
}
