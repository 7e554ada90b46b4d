#pragma once

#include <optional>

#include "edgebatch/model.hpp"

namespace edgebatch {

/// Tasks whose latency budget clears the batch-time threshold f(n).
struct FeasibleSet {
  int batch_size = 0;
  std::vector<std::int64_t> members;  // ascending (rho_min, id)
};

FeasibleSet feasible_set(const Instance& instance, int batch_size);

/// Fixed-cardinality feasibility: an n-task subset meeting both the
/// bandwidth and the threshold latency constraint, or nullopt. The witness
/// is the n smallest-rho_min feasible tasks (ties by id).
std::optional<Selection> solve_p3(const Instance& instance, int batch_size,
                                  bool ignore_bandwidth = false);

/// Sequential search over the batch size: returns the selection for the
/// largest n at which solve_p3 succeeds (empty selection if n = 1 fails).
Selection solve_p1(const Instance& instance, bool ignore_bandwidth = false);

}  // namespace edgebatch
