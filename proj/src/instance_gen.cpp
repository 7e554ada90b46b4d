#include "edgebatch/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace {
double positive_snr(double snr) { return std::max(snr, 1e-12); }
}  // namespace

namespace edgebatch {

namespace {

LatencyProfile random_profile(RngStream& rng, int depth, double table_prob) {
  LatencyProfile profile;
  for (int d = 0; d < depth; ++d) {
    const double c0 = rng.uniform(0.0, 0.02);
    const double c1 = rng.uniform(0.001, 0.02);
    if (rng.next_double() < table_prob) {
      std::vector<std::pair<int, double>> samples;
      for (int n = 1; n <= 24; ++n)
        samples.emplace_back(n, c0 + c1 * n + rng.uniform(0.0, 0.2) * c1);
      // sorting the values keeps the table monotone
      std::vector<double> values;
      values.reserve(samples.size());
      for (auto& [n, t] : samples) values.push_back(t);
      std::sort(values.begin(), values.end());
      for (std::size_t i = 0; i < samples.size(); ++i) samples[i].second = values[i];
      profile.block_times.push_back(BatchTimeFn::table(std::move(samples)));
    } else {
      profile.block_times.push_back(BatchTimeFn::linear(c0, c1));
    }
  }
  for (int d = 0; d < depth; ++d) {
    profile.accuracy_per_exit.push_back(0.5 +
                                        0.4 * (d + 1) / static_cast<double>(depth));
  }
  return profile;
}

}  // namespace

Instance random_instance(RngStream& rng, const RandomInstanceParams& params) {
  SystemConfig config = SystemConfig::make(
      std::exp(rng.uniform(std::log(params.bandwidth_lo_hz),
                           std::log(params.bandwidth_hi_hz))),
      1.0, 0.25);
  LatencyProfile profile =
      random_profile(rng, params.depth, params.table_profile_prob);
  std::vector<TaskRequest> tasks;
  tasks.reserve(static_cast<std::size_t>(params.task_count));
  for (int i = 0; i < params.task_count; ++i) {
    TaskRequest task;
    task.id = i + 1;
    task.snr = positive_snr(100.0 * rng.exponential(1.0));  // 20 dB mean, Rayleigh power
    task.feature_bits = 80000;
    task.deadline_s = rng.uniform(0.3, 2.0);
    task.waiting_s = rng.uniform(0.0, 0.3);
    task.exit_point = 1 + static_cast<int>(rng.next_below(
                              static_cast<std::uint64_t>(params.depth)));
    tasks.push_back(task);
  }
  return make_instance(std::move(config), std::move(profile), std::move(tasks));
}

Instance benchmark_instance(RngStream& rng, int task_count, int depth) {
  SystemConfig config = SystemConfig::make(2.0e7, 1.0, 0.25);
  LatencyProfile profile = make_default_profile(depth);
  std::vector<TaskRequest> tasks;
  tasks.reserve(static_cast<std::size_t>(task_count));
  for (int i = 0; i < task_count; ++i) {
    TaskRequest task;
    task.id = i + 1;
    task.snr = positive_snr(100.0 * rng.exponential(1.0));
    task.feature_bits = 80000;
    task.deadline_s = rng.uniform(0.5, 2.0);
    task.waiting_s = rng.uniform(0.0, 0.25);
    task.exit_point =
        1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(depth)));
    tasks.push_back(task);
  }
  return make_instance(std::move(config), std::move(profile), std::move(tasks));
}

}  // namespace edgebatch
