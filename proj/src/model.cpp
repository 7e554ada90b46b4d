#include "edgebatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace edgebatch {

SystemConfig SystemConfig::make(double bandwidth_hz, double noise_w, double slot_s) {
  SystemConfig config;
  config.total_bandwidth_hz = bandwidth_hz;
  config.noise_power_w = noise_w;
  config.slot_duration_s = slot_s;
  config.comm_slot_s = slot_s;
  config.comp_slot_s = slot_s;
  return config;
}

void validate(const SystemConfig& config) {
  if (config.total_bandwidth_hz <= 0.0)
    throw std::domain_error("config.total_bandwidth_hz must be positive");
  if (config.noise_power_w <= 0.0)
    throw std::domain_error("config.noise_power_w must be positive");
  if (config.slot_duration_s <= 0.0)
    throw std::domain_error("config.slot_duration_s must be positive");
  if (config.comm_slot_s <= 0.0)
    throw std::domain_error("config.comm_slot_s must be positive");
  if (config.comp_slot_s <= 0.0)
    throw std::domain_error("config.comp_slot_s must be positive");
  if (config.bandwidth_tolerance < 0.0)
    throw std::domain_error("config.bandwidth_tolerance must be non-negative");
}

double TaskRequest::snr_from_channel(double channel_gain, double tx_power_w,
                                     double noise_power_w) {
  if (noise_power_w <= 0.0)
    throw std::domain_error("noise power must be positive");
  return tx_power_w * channel_gain * channel_gain / noise_power_w;
}

BatchTimeFn BatchTimeFn::linear(double c0, double c1) {
  BatchTimeFn fn;
  fn.linear_ = true;
  fn.c0_ = c0;
  fn.c1_ = c1;
  return fn;
}

BatchTimeFn BatchTimeFn::table(std::vector<std::pair<int, double>> samples) {
  BatchTimeFn fn;
  fn.linear_ = false;
  std::sort(samples.begin(), samples.end());
  fn.samples_ = std::move(samples);
  if (fn.samples_.empty())
    throw std::domain_error("batch-time table must not be empty");
  for (std::size_t i = 1; i < fn.samples_.size(); ++i) {
    if (fn.samples_[i].first == fn.samples_[i - 1].first)
      throw std::domain_error("batch-time table has duplicate batch sizes");
  }
  return fn;
}

double BatchTimeFn::operator()(int batch) const {
  if (batch <= 0) return 0.0;
  if (linear_) return c0_ + c1_ * static_cast<double>(batch);
  // locate the first sample with batch size >= batch
  auto it = std::lower_bound(
      samples_.begin(), samples_.end(), batch,
      [](const std::pair<int, double>& s, int b) { return s.first < b; });
  if (it != samples_.end() && it->first == batch) return it->second;
  if (it == samples_.begin()) {
    // below the first sample: interpolate from (0, 0)
    return it->second * static_cast<double>(batch) / static_cast<double>(it->first);
  }
  const auto& hi = (it == samples_.end()) ? samples_.back() : *it;
  const auto& lo = (it == samples_.end()) ? *(samples_.end() - 2) : *(it - 1);
  if (it == samples_.end() && samples_.size() == 1) {
    // single sample: extend proportionally through the origin
    return samples_.back().second * static_cast<double>(batch) /
           static_cast<double>(samples_.back().first);
  }
  const double slope = (hi.second - lo.second) /
                       static_cast<double>(hi.first - lo.first);
  const auto& base = (it == samples_.end()) ? samples_.back() : lo;
  return base.second + slope * static_cast<double>(batch - base.first);
}

double BatchTimeFn::tail_slope() const {
  if (linear_) return c1_;
  if (samples_.size() == 1)
    return samples_.back().second / static_cast<double>(samples_.back().first);
  const auto& a = samples_[samples_.size() - 2];
  const auto& b = samples_.back();
  return (b.second - a.second) / static_cast<double>(b.first - a.first);
}

void BatchTimeFn::validate_monotone(int max_batch_checked) const {
  double prev = (*this)(0);
  if (prev != 0.0) throw std::domain_error("batch-time mapping must be 0 at batch 0");
  for (int n = 1; n <= max_batch_checked; ++n) {
    const double cur = (*this)(n);
    if (cur < 0.0) throw std::domain_error("batch-time mapping must be non-negative");
    if (n >= 2 && cur < prev)
      throw std::domain_error("batch-time mapping must be non-decreasing");
    prev = cur;
  }
}

double LatencyProfile::block_time(int depth_one_based, int batch) const {
  return block_times[static_cast<std::size_t>(depth_one_based - 1)](batch);
}

double LatencyProfile::full_time(int batch) const {
  if (full_time_fn) return (*full_time_fn)(batch);
  double total = 0.0;
  for (const auto& fn : block_times) total += fn(batch);
  return total;
}

double LatencyProfile::prefix_time(int exit_depth, int batch) const {
  double total = 0.0;
  for (int d = 1; d <= exit_depth; ++d) total += block_time(d, batch);
  return total;
}

void validate(const LatencyProfile& profile, int max_batch_checked) {
  if (profile.block_times.empty())
    throw std::domain_error("profile needs at least one block");
  for (const auto& fn : profile.block_times) fn.validate_monotone(max_batch_checked);
  if (profile.full_time_fn) profile.full_time_fn->validate_monotone(max_batch_checked);
  if (profile.accuracy_per_exit.size() != profile.block_times.size())
    throw std::domain_error("accuracy_per_exit must have one entry per block");
  for (std::size_t i = 0; i < profile.accuracy_per_exit.size(); ++i) {
    const double a = profile.accuracy_per_exit[i];
    if (a <= 0.0 || a >= 1.0)
      throw std::domain_error("accuracy_per_exit entries must lie in (0,1)");
    if (i > 0 && a <= profile.accuracy_per_exit[i - 1])
      throw std::domain_error("accuracy_per_exit must be strictly increasing");
  }
}

LatencyProfile make_default_profile(int depth) {
  if (depth < 1) throw std::domain_error("profile depth must be >= 1");
  LatencyProfile profile;
  const double c0_total = 0.039;
  const double c1_total = 0.0105;
  for (int d = 0; d < depth; ++d) {
    profile.block_times.push_back(
        BatchTimeFn::linear(c0_total / depth, c1_total / depth));
  }
  // final exit pinned at 0.749, earlier exits spread below it
  profile.accuracy_per_exit.resize(static_cast<std::size_t>(depth));
  profile.accuracy_per_exit[static_cast<std::size_t>(depth) - 1] = 0.749;
  if (depth == 3) {
    profile.accuracy_per_exit = {0.60, 0.70, 0.749};
  } else {
    for (int d = 0; d < depth - 1; ++d) {
      profile.accuracy_per_exit[static_cast<std::size_t>(d)] =
          0.55 + (0.749 - 0.55) * static_cast<double>(d + 1) / depth;
    }
  }
  return profile;
}

int Instance::index_of(std::int64_t id) const {
  auto it = id_index.find(id);
  if (it == id_index.end())
    throw std::domain_error("unknown task id " + std::to_string(id));
  return it->second;
}

Instance make_instance(SystemConfig config, LatencyProfile profile,
                       std::vector<TaskRequest> tasks) {
  validate(config);
  validate(profile);
  Instance instance;
  instance.config = config;
  instance.profile = std::move(profile);
  instance.tasks = std::move(tasks);
  const int depth = instance.depth();
  instance.rho_min.reserve(instance.tasks.size());
  instance.latency_budget_s.reserve(instance.tasks.size());
  for (std::size_t i = 0; i < instance.tasks.size(); ++i) {
    const TaskRequest& task = instance.tasks[i];
    if (task.feature_bits <= 0)
      throw std::domain_error("task " + std::to_string(task.id) +
                              ": feature_bits must be positive");
    if (task.deadline_s <= 0.0)
      throw std::domain_error("task " + std::to_string(task.id) +
                              ": deadline_s must be positive");
    if (task.waiting_s < 0.0)
      throw std::domain_error("task " + std::to_string(task.id) +
                              ": waiting_s must be non-negative");
    if (task.exit_point < 1 || task.exit_point > depth)
      throw std::domain_error("task " + std::to_string(task.id) +
                              ": exit_point out of range 1..D");
    if (!instance.id_index.emplace(task.id, static_cast<int>(i)).second)
      throw std::domain_error("duplicate task id " + std::to_string(task.id));
    instance.rho_min.push_back(min_bandwidth_fraction(task, instance.config));
    instance.latency_budget_s.push_back(latency_budget(task, instance.config));
  }
  return instance;
}

double Selection::bandwidth_sum() const {
  double sum = 0.0;
  for (const auto& [id, rho] : bandwidth_fractions) sum += rho;
  return sum;
}

Selection make_empty_selection(const Instance& instance) {
  Selection selection;
  selection.per_depth.assign(static_cast<std::size_t>(instance.depth()), {});
  selection.block_batch_sizes.assign(static_cast<std::size_t>(instance.depth()), 0);
  return selection;
}

namespace {

Selection make_selection_common(const Instance& instance,
                                std::vector<std::int64_t> ids) {
  Selection selection = make_empty_selection(instance);
  std::sort(ids.begin(), ids.end());
  selection.selected_ids = std::move(ids);
  std::vector<int> exits;
  exits.reserve(selection.selected_ids.size());
  for (std::int64_t id : selection.selected_ids) {
    const int idx = instance.index_of(id);
    const TaskRequest& task = instance.tasks[static_cast<std::size_t>(idx)];
    selection.per_depth[static_cast<std::size_t>(task.exit_point) - 1].push_back(id);
    selection.bandwidth_fractions[id] = instance.rho_min[static_cast<std::size_t>(idx)];
    exits.push_back(task.exit_point);
  }
  selection.block_batch_sizes = block_batch_sizes(exits, instance.depth());
  return selection;
}

}  // namespace

Selection make_selection_full(const Instance& instance,
                              std::vector<std::int64_t> ids) {
  Selection selection = make_selection_common(instance, std::move(ids));
  const double compute = instance.profile.full_time(selection.cardinality());
  for (std::int64_t id : selection.selected_ids)
    selection.predicted_compute_s[id] = compute;
  return selection;
}

Selection make_selection_ee(const Instance& instance,
                            std::vector<std::int64_t> ids) {
  Selection selection = make_selection_common(instance, std::move(ids));
  const int depth = instance.depth();
  // prefix[d] = time to finish blocks 1..d with the shrinking batch sizes
  std::vector<double> prefix(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int d = 1; d <= depth; ++d) {
    prefix[static_cast<std::size_t>(d)] =
        prefix[static_cast<std::size_t>(d) - 1] +
        instance.profile.block_time(d, selection.block_batch_sizes[static_cast<std::size_t>(d) - 1]);
  }
  for (std::int64_t id : selection.selected_ids) {
    const TaskRequest& task =
        instance.tasks[static_cast<std::size_t>(instance.index_of(id))];
    selection.predicted_compute_s[id] = prefix[static_cast<std::size_t>(task.exit_point)];
  }
  return selection;
}

double min_bandwidth_fraction(const TaskRequest& task, const SystemConfig& config) {
  if (task.snr <= 0.0)
    throw std::domain_error("task " + std::to_string(task.id) +
                            ": snr must be positive");
  if (config.total_bandwidth_hz <= 0.0)
    throw std::domain_error("total bandwidth must be positive");
  const double rate_per_hz = std::log2(1.0 + task.snr);
  return static_cast<double>(task.feature_bits) /
         (config.comm_slot_s * config.total_bandwidth_hz * rate_per_hz);
}

double latency_budget(const TaskRequest& task, const SystemConfig& config) {
  return std::min(task.deadline_s - task.waiting_s - config.comm_slot_s,
                  config.comp_slot_s);
}

std::vector<int> block_batch_sizes(const std::vector<int>& exit_points, int depth) {
  std::vector<int> per_exit(static_cast<std::size_t>(depth), 0);
  for (int exit : exit_points) {
    if (exit < 1 || exit > depth)
      throw std::domain_error("exit point out of range 1..D");
    ++per_exit[static_cast<std::size_t>(exit) - 1];
  }
  std::vector<int> sizes(static_cast<std::size_t>(depth), 0);
  int running = 0;
  for (int d = depth; d >= 1; --d) {
    running += per_exit[static_cast<std::size_t>(d) - 1];
    sizes[static_cast<std::size_t>(d) - 1] = running;
  }
  return sizes;
}

std::optional<int> exit_point_for_accuracy(double accuracy,
                                           const LatencyProfile& profile) {
  if (accuracy <= 0.0 || accuracy >= 1.0)
    throw std::domain_error("accuracy requirement must lie in (0,1)");
  for (int d = 1; d <= profile.depth(); ++d) {
    if (profile.accuracy_per_exit[static_cast<std::size_t>(d) - 1] >= accuracy)
      return d;
  }
  return std::nullopt;
}

std::vector<int> tasks_by_rho(const Instance& instance) {
  std::vector<int> order(instance.tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = instance.rho_min[static_cast<std::size_t>(a)];
    const double rb = instance.rho_min[static_cast<std::size_t>(b)];
    if (ra != rb) return ra < rb;
    return instance.tasks[static_cast<std::size_t>(a)].id <
           instance.tasks[static_cast<std::size_t>(b)].id;
  });
  return order;
}

double priority_rho_sum(const Instance& instance,
                        const std::vector<std::int64_t>& ids) {
  std::vector<int> indices;
  indices.reserve(ids.size());
  for (std::int64_t id : ids) indices.push_back(instance.index_of(id));
  std::sort(indices.begin(), indices.end(), [&](int a, int b) {
    const double ra = instance.rho_min[static_cast<std::size_t>(a)];
    const double rb = instance.rho_min[static_cast<std::size_t>(b)];
    if (ra != rb) return ra < rb;
    return instance.tasks[static_cast<std::size_t>(a)].id <
           instance.tasks[static_cast<std::size_t>(b)].id;
  });
  double sum = 0.0;
  for (int idx : indices) sum += instance.rho_min[static_cast<std::size_t>(idx)];
  return sum;
}

bool check_feasible_ids(const std::vector<std::int64_t>& ids,
                        const Instance& instance, bool early_exit) {
  std::vector<int> indices;
  indices.reserve(ids.size());
  for (std::int64_t id : ids) indices.push_back(instance.index_of(id));

  if (!bandwidth_within_budget(priority_rho_sum(instance, ids), instance.config))
    return false;
  if (indices.empty()) return true;

  if (!early_exit) {
    const double compute = instance.profile.full_time(static_cast<int>(ids.size()));
    for (int idx : indices) {
      if (!(compute <= instance.latency_budget_s[static_cast<std::size_t>(idx)]))
        return false;
    }
    return true;
  }

  const int depth = instance.depth();
  std::vector<int> exits;
  exits.reserve(indices.size());
  for (int idx : indices)
    exits.push_back(instance.tasks[static_cast<std::size_t>(idx)].exit_point);
  const std::vector<int> batch = block_batch_sizes(exits, depth);

  // prefix[d] = left-fold of f_1(n_1)..f_d(n_d); the per-task test below is
  // the canonical form shared with every solver in this repo.
  std::vector<double> prefix(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int d = 1; d <= depth; ++d) {
    prefix[static_cast<std::size_t>(d)] =
        prefix[static_cast<std::size_t>(d) - 1] +
        instance.profile.block_time(d, batch[static_cast<std::size_t>(d) - 1]);
  }
  for (int idx : indices) {
    const int exit = instance.tasks[static_cast<std::size_t>(idx)].exit_point;
    const double step = instance.profile.block_time(exit, batch[static_cast<std::size_t>(exit) - 1]);
    if (!latency_step_ok(step, instance.latency_budget_s[static_cast<std::size_t>(idx)],
                         prefix[static_cast<std::size_t>(exit) - 1]))
      return false;
  }
  return true;
}

bool check_feasible(const Selection& selection, const Instance& instance,
                    bool early_exit) {
  return check_feasible_ids(selection.selected_ids, instance, early_exit);
}

}  // namespace edgebatch
