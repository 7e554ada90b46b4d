#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "edgebatch/io.hpp"
#include "edgebatch/sim.hpp"

namespace edgebatch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitCertify = 3;

int cmd_solve(const std::string& instance_path, const std::string& policy,
              bool no_bandwidth, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::string scenario_path;
  std::string vary = "lambda";  // lambda | slot | mean-accuracy | mean-latency
  std::vector<double> grid;     // empty -> per-axis default
  std::vector<std::string> policies = {"full-opt"};
  int seeds = 5;
  std::string output_csv = "sweep.csv";
  StaticParams static_params;
  int workers = 0;  // 0 -> EDGEBATCH_WORKERS env var, else hardware
};

struct SweepOutput {
  std::string csv;
  RunManifest manifest;
};

/// Pure sweep runner; rows are ordered deterministically regardless of the
/// worker fan-out.
SweepOutput run_sweep(const Scenario& base, const SweepOptions& options);

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);

struct BenchPruningOptions {
  std::string scenario_path;  // marks and system config; empty -> defaults
  std::vector<int> task_counts = {16, 24, 32};
  std::vector<int> depths = {3, 5};
  int instances = 100;
  std::uint64_t seed = 1;
  std::string output_csv = "pruning.csv";
  std::int64_t node_cap = 2'000'000;
};

int cmd_bench_pruning(const BenchPruningOptions& options, std::ostream& out,
                      std::ostream& err);

struct CertifyOptions {
  int max_tasks = 10;
  int max_depth = 3;
  int instances = 500;
  std::uint64_t seed = 1;
  std::string failure_path = "certify_failure.json";
  /// Test hook: pretend this instance index failed, exercising the
  /// reporting path without a real solver bug.
  int inject_failure_at = -1;
};

int cmd_certify(const CertifyOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace edgebatch
