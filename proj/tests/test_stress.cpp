#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Adversarial regimes for the solver/oracle agreement: exact boundary ties
// everywhere (dyadic values), degenerate groups, tied bandwidth costs, and
// deep exit chains.

#include <cmath>

#include "edgebatch/oracle.hpp"
#include "edgebatch/rng.hpp"
#include "edgebatch/solver_ee.hpp"
#include "edgebatch/solver_full.hpp"
#include "support/test_instances.hpp"

using namespace edgebatch;
using test_support::explicit_instance;
using test_support::TaskSpec;

namespace {

// Dyadic grid: every value is a multiple of 2^-6, so sums and differences up
// to moderate size are exact and threshold comparisons tie exactly.
double dyadic(RngStream& rng, int max_64ths) {
  return static_cast<double>(1 + rng.next_below(static_cast<std::uint64_t>(max_64ths))) /
         64.0;
}

Instance dyadic_instance(RngStream& rng, int task_count, int depth) {
  LatencyProfile profile;
  for (int d = 0; d < depth; ++d) {
    // c0 in {0, 1/64, 2/64}, c1 in {1/64 .. 4/64}
    const double c0 = static_cast<double>(rng.next_below(3)) / 64.0;
    profile.block_times.push_back(BatchTimeFn::linear(c0, dyadic(rng, 4)));
  }
  for (int d = 0; d < depth; ++d)
    profile.accuracy_per_exit.push_back(0.5 + 0.4 * (d + 1) / depth);
  std::vector<TaskSpec> specs;
  for (int i = 0; i < task_count; ++i) {
    TaskSpec spec;
    spec.id = i + 1;
    spec.budget = dyadic(rng, 64);  // 1/64 .. 1
    // tied rho values on a coarse grid force tie-break paths
    spec.rho = static_cast<double>(1 + rng.next_below(8)) / 8.0;
    spec.exit = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(depth)));
    specs.push_back(spec);
  }
  return explicit_instance(std::move(profile), specs, 4.0);
}

void check_agreement(const Instance& instance) {
  const P2Result fast = solve_p2_optimal(instance);
  const Selection brute = oracle::brute_force_max(instance, true);
  REQUIRE(fast.selection.cardinality() == brute.cardinality());
  if (!fast.selection.empty())
    REQUIRE(check_feasible(fast.selection, instance, true));
  REQUIRE(solve_p2_suboptimal(instance).cardinality() <=
          fast.selection.cardinality());
  const Selection full_fast = solve_p1(instance);
  const Selection full_brute = oracle::brute_force_max(instance, false);
  REQUIRE(full_fast.cardinality() == full_brute.cardinality());
  for (int n = 1; n <= instance.task_count(); ++n) {
    const TreeSearchResult pruned = solve_p4_tree(instance, n);
    const oracle::ExhaustiveResult reference =
        oracle::exhaustive_tree_search(instance, n);
    REQUIRE(pruned.selection.has_value() == reference.selection.has_value());
    REQUIRE(pruned.stats.nodes_visited <= reference.stats.nodes_visited);
  }
}

}  // namespace

TEST_CASE("exact-tie dyadic instances: solvers and oracles never diverge") {
  RngStream rng(601, "stress-dyadic");
  for (int trial = 0; trial < 400; ++trial) {
    const int depth = 2 + static_cast<int>(rng.next_below(3));
    const int tasks = 1 + static_cast<int>(rng.next_below(9));
    check_agreement(dyadic_instance(rng, tasks, depth));
  }
}

TEST_CASE("bandwidth boundary: rho sums landing exactly on the budget") {
  RngStream rng(607, "stress-bw");
  for (int trial = 0; trial < 200; ++trial) {
    const int depth = 2 + static_cast<int>(rng.next_below(2));
    const int tasks = 2 + static_cast<int>(rng.next_below(7));
    Instance instance = dyadic_instance(rng, tasks, depth);
    // make a random prefix of the rho order sum to exactly 1
    const int prefix = 1 + static_cast<int>(rng.next_below(
                               static_cast<std::uint64_t>(tasks)));
    for (int i = 0; i < instance.task_count(); ++i)
      instance.rho_min[static_cast<std::size_t>(i)] =
          i < prefix ? 1.0 / prefix : 2.0;
    check_agreement(instance);
  }
}

TEST_CASE("degenerate group layouts") {
  RngStream rng(613, "stress-groups");
  SUBCASE("everyone exits at the deepest block") {
    for (int trial = 0; trial < 100; ++trial) {
      Instance instance = dyadic_instance(rng, 6, 3);
      for (TaskRequest& task : instance.tasks) task.exit_point = 3;
      check_agreement(instance);
    }
  }
  SUBCASE("everyone exits immediately") {
    for (int trial = 0; trial < 100; ++trial) {
      Instance instance = dyadic_instance(rng, 6, 3);
      for (TaskRequest& task : instance.tasks) task.exit_point = 1;
      check_agreement(instance);
    }
  }
  SUBCASE("deep chains with one task per group") {
    for (int trial = 0; trial < 60; ++trial) {
      Instance instance = dyadic_instance(rng, 8, 8);
      for (int i = 0; i < instance.task_count(); ++i)
        instance.tasks[static_cast<std::size_t>(i)].exit_point = i + 1;
      check_agreement(instance);
    }
  }
}

TEST_CASE("zero fixed-cost blocks keep thresholds consistent") {
  RngStream rng(617, "stress-zero");
  for (int trial = 0; trial < 100; ++trial) {
    const int depth = 2 + static_cast<int>(rng.next_below(3));
    LatencyProfile profile;
    for (int d = 0; d < depth; ++d)
      profile.block_times.push_back(BatchTimeFn::linear(0.0, dyadic(rng, 4)));
    for (int d = 0; d < depth; ++d)
      profile.accuracy_per_exit.push_back(0.5 + 0.4 * (d + 1) / depth);
    std::vector<TaskSpec> specs;
    const int tasks = 1 + static_cast<int>(rng.next_below(8));
    for (int i = 0; i < tasks; ++i) {
      specs.push_back({i + 1, dyadic(rng, 48),
                       static_cast<double>(1 + rng.next_below(6)) / 6.0,
                       1 + static_cast<int>(rng.next_below(
                               static_cast<std::uint64_t>(depth)))});
    }
    check_agreement(explicit_instance(std::move(profile), specs, 4.0));
  }
}
