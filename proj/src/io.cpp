#include "edgebatch/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

namespace edgebatch {

const char* const kToolVersion = "1.0.0";

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

namespace {

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(what + ": " + e.what());
  }
}

const json& require_field(const json& obj, const std::string& ctx,
                          const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw SchemaError(ctx + "." + key + ": missing");
  return obj.at(key);
}

double require_number(const json& obj, const std::string& ctx, const char* key) {
  const json& value = require_field(obj, ctx, key);
  if (!value.is_number())
    throw SchemaError(ctx + "." + key + ": expected a number");
  return value.get<double>();
}

double optional_number(const json& obj, const std::string& ctx, const char* key,
                       double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& value = obj.at(key);
  if (!value.is_number())
    throw SchemaError(ctx + "." + key + ": expected a number");
  return value.get<double>();
}

std::int64_t require_integer(const json& obj, const std::string& ctx,
                             const char* key) {
  const json& value = require_field(obj, ctx, key);
  if (!value.is_number_integer())
    throw SchemaError(ctx + "." + key + ": expected an integer");
  return value.get<std::int64_t>();
}

SystemConfig parse_config(const json& j, const std::string& ctx) {
  SystemConfig config;
  config.total_bandwidth_hz = require_number(j, ctx, "total_bandwidth_hz");
  config.noise_power_w = optional_number(j, ctx, "noise_power_w", 1.0);
  config.slot_duration_s = require_number(j, ctx, "slot_duration_s");
  config.comm_slot_s = optional_number(j, ctx, "comm_slot_s", config.slot_duration_s);
  config.comp_slot_s = optional_number(j, ctx, "comp_slot_s", config.slot_duration_s);
  config.bandwidth_tolerance = optional_number(j, ctx, "bandwidth_tolerance", 1e-9);
  try {
    validate(config);
  } catch (const std::domain_error& e) {
    throw SchemaError(ctx + ": " + e.what());
  }
  return config;
}

BatchTimeFn parse_time_fn(const json& j, const std::string& ctx) {
  if (j.is_object()) {
    const double c0 = require_number(j, ctx, "c0");
    const double c1 = require_number(j, ctx, "c1");
    return BatchTimeFn::linear(c0, c1);
  }
  if (j.is_array()) {
    std::vector<std::pair<int, double>> samples;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const json& entry = j.at(i);
      if (!entry.is_array() || entry.size() != 2 ||
          !entry.at(0).is_number_integer() || !entry.at(1).is_number())
        throw SchemaError(ctx + "[" + std::to_string(i) +
                          "]: expected [batch, seconds]");
      samples.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
    }
    try {
      return BatchTimeFn::table(std::move(samples));
    } catch (const std::domain_error& e) {
      throw SchemaError(ctx + ": " + e.what());
    }
  }
  throw SchemaError(ctx + ": expected {c0,c1} or [[batch, seconds],...]");
}

LatencyProfile parse_profile(const json& j, const std::string& ctx) {
  LatencyProfile profile;
  if (j.contains("linear")) {
    const json& linear = j.at("linear");
    const json& c0 = require_field(linear, ctx + ".linear", "c0");
    const json& c1 = require_field(linear, ctx + ".linear", "c1");
    if (!c0.is_array() || !c1.is_array() || c0.size() != c1.size() || c0.empty())
      throw SchemaError(ctx + ".linear: c0 and c1 must be equal-length arrays");
    for (std::size_t d = 0; d < c0.size(); ++d) {
      if (!c0.at(d).is_number() || !c1.at(d).is_number())
        throw SchemaError(ctx + ".linear: coefficients must be numbers");
      profile.block_times.push_back(
          BatchTimeFn::linear(c0.at(d).get<double>(), c1.at(d).get<double>()));
    }
  } else if (j.contains("table")) {
    const json& table = j.at("table");
    if (!table.is_array() || table.empty())
      throw SchemaError(ctx + ".table: expected one table per block");
    for (std::size_t d = 0; d < table.size(); ++d) {
      profile.block_times.push_back(
          parse_time_fn(table.at(d), ctx + ".table[" + std::to_string(d) + "]"));
    }
  } else {
    throw SchemaError(ctx + ": needs either linear or table");
  }
  if (j.contains("full"))
    profile.full_time_fn = parse_time_fn(j.at("full"), ctx + ".full");
  if (j.contains("accuracy_per_exit")) {
    const json& acc = j.at("accuracy_per_exit");
    if (!acc.is_array())
      throw SchemaError(ctx + ".accuracy_per_exit: expected an array");
    for (const json& v : acc) {
      if (!v.is_number())
        throw SchemaError(ctx + ".accuracy_per_exit: expected numbers");
      profile.accuracy_per_exit.push_back(v.get<double>());
    }
  } else {
    const int depth = static_cast<int>(profile.block_times.size());
    profile.accuracy_per_exit = make_default_profile(std::max(depth, 1)).accuracy_per_exit;
    profile.accuracy_per_exit.resize(static_cast<std::size_t>(depth));
  }
  try {
    validate(profile);
  } catch (const std::domain_error& e) {
    throw SchemaError(ctx + ": " + e.what());
  }
  return profile;
}

TaskRequest parse_task(const json& j, const std::string& ctx,
                       const LatencyProfile& profile,
                       const SystemConfig& config) {
  TaskRequest task;
  task.id = require_integer(j, ctx, "id");
  if (j.contains("snr")) {
    task.snr = require_number(j, ctx, "snr");
  } else if (j.contains("channel_gain") && j.contains("tx_power")) {
    task.snr = TaskRequest::snr_from_channel(
        require_number(j, ctx, "channel_gain"),
        require_number(j, ctx, "tx_power"), config.noise_power_w);
  } else {
    throw SchemaError(ctx + ": needs snr or channel_gain with tx_power");
  }
  if (task.snr <= 0.0) throw SchemaError(ctx + ".snr: must be positive");
  task.feature_bits = require_integer(j, ctx, "feature_bits");
  task.deadline_s = require_number(j, ctx, "deadline_s");
  task.waiting_s = optional_number(j, ctx, "waiting_s", 0.0);
  if (j.contains("exit_point")) {
    task.exit_point = static_cast<int>(require_integer(j, ctx, "exit_point"));
    if (j.contains("accuracy_req"))
      task.accuracy_req = require_number(j, ctx, "accuracy_req");
  } else if (j.contains("accuracy_req")) {
    const double accuracy = require_number(j, ctx, "accuracy_req");
    task.accuracy_req = accuracy;
    std::optional<int> exit;
    try {
      exit = exit_point_for_accuracy(accuracy, profile);
    } catch (const std::domain_error& e) {
      throw SchemaError(ctx + ".accuracy_req: " + e.what());
    }
    if (!exit)
      throw SchemaError(ctx + ".accuracy_req: unattainable with this profile");
    task.exit_point = *exit;
  } else if (profile.depth() == 1) {
    task.exit_point = 1;
  } else {
    throw SchemaError(ctx + ": needs exit_point or accuracy_req");
  }
  return task;
}

json time_fn_to_json(const BatchTimeFn& fn) {
  if (fn.is_linear())
    return json{{"c0", fn.linear_c0()}, {"c1", fn.linear_c1()}};
  json table = json::array();
  for (const auto& [n, t] : fn.samples()) table.push_back(json::array({n, t}));
  return table;
}

json profile_to_json(const LatencyProfile& profile) {
  json j;
  bool all_linear = true;
  for (const auto& fn : profile.block_times) all_linear &= fn.is_linear();
  if (all_linear) {
    json c0 = json::array();
    json c1 = json::array();
    for (const auto& fn : profile.block_times) {
      c0.push_back(fn.linear_c0());
      c1.push_back(fn.linear_c1());
    }
    j["linear"] = json{{"c0", c0}, {"c1", c1}};
  } else {
    json table = json::array();
    for (const auto& fn : profile.block_times) table.push_back(time_fn_to_json(fn));
    j["table"] = table;
  }
  if (profile.full_time_fn) j["full"] = time_fn_to_json(*profile.full_time_fn);
  j["accuracy_per_exit"] = profile.accuracy_per_exit;
  return j;
}

json config_to_json(const SystemConfig& config) {
  return json{{"total_bandwidth_hz", config.total_bandwidth_hz},
              {"noise_power_w", config.noise_power_w},
              {"slot_duration_s", config.slot_duration_s},
              {"comm_slot_s", config.comm_slot_s},
              {"comp_slot_s", config.comp_slot_s},
              {"bandwidth_tolerance", config.bandwidth_tolerance}};
}

}  // namespace

Instance parse_instance_json(const std::string& text) {
  const json j = parse_json_text(text, "instance");
  SystemConfig config = parse_config(require_field(j, "instance", "config"), "config");
  LatencyProfile profile =
      parse_profile(require_field(j, "instance", "profile"), "profile");
  const json& tasks_json = require_field(j, "instance", "tasks");
  if (!tasks_json.is_array()) throw SchemaError("tasks: expected an array");
  std::vector<TaskRequest> tasks;
  tasks.reserve(tasks_json.size());
  for (std::size_t i = 0; i < tasks_json.size(); ++i) {
    tasks.push_back(parse_task(tasks_json.at(i),
                               "tasks[" + std::to_string(i) + "]", profile,
                               config));
  }
  try {
    return make_instance(std::move(config), std::move(profile), std::move(tasks));
  } catch (const std::domain_error& e) {
    throw SchemaError(std::string("instance: ") + e.what());
  }
}

Instance load_instance_file(const std::string& path) {
  return parse_instance_json(read_text_file(path));
}

std::string instance_to_json(const Instance& instance) {
  ordered_json j;
  j["config"] = config_to_json(instance.config);
  j["profile"] = profile_to_json(instance.profile);
  json tasks = json::array();
  for (const TaskRequest& task : instance.tasks) {
    json t{{"id", task.id},
           {"snr", task.snr},
           {"feature_bits", task.feature_bits},
           {"deadline_s", task.deadline_s},
           {"waiting_s", task.waiting_s},
           {"exit_point", task.exit_point}};
    if (task.accuracy_req) t["accuracy_req"] = *task.accuracy_req;
    tasks.push_back(t);
  }
  j["tasks"] = tasks;
  return j.dump(2) + "\n";
}

Scenario parse_scenario_json(const std::string& text) {
  const json j = parse_json_text(text, "scenario");
  Scenario scenario;
  if (j.contains("scenario_id")) {
    if (!j.at("scenario_id").is_string())
      throw SchemaError("scenario_id: expected a string");
    scenario.scenario_id = j.at("scenario_id").get<std::string>();
  }
  scenario.arrival_rate = require_number(j, "scenario", "arrival_rate");
  scenario.duration_s = require_number(j, "scenario", "duration_s");
  scenario.seed = static_cast<std::uint64_t>(
      optional_number(j, "scenario", "seed", 1.0));
  scenario.avg_path_loss = optional_number(j, "scenario", "avg_path_loss", 1e-3);
  scenario.snr_db = optional_number(j, "scenario", "snr_db", 20.0);
  scenario.feature_bits = static_cast<std::int64_t>(
      optional_number(j, "scenario", "feature_bits", 80000.0));
  if (j.contains("deadline_s")) {
    const json& dist = j.at("deadline_s");
    scenario.deadline_dist.lo = require_number(dist, "deadline_s", "lo");
    scenario.deadline_dist.hi = require_number(dist, "deadline_s", "hi");
  }
  if (j.contains("exit_weights")) {
    const json& weights = j.at("exit_weights");
    if (!weights.is_array())
      throw SchemaError("exit_weights: expected an array");
    scenario.exit_weights.clear();
    for (const json& w : weights) {
      if (!w.is_number()) throw SchemaError("exit_weights: expected numbers");
      scenario.exit_weights.push_back(w.get<double>());
    }
  }
  if (j.contains("accuracy_req")) {
    const json& dist = j.at("accuracy_req");
    UniformRange range;
    range.lo = require_number(dist, "accuracy_req", "lo");
    range.hi = require_number(dist, "accuracy_req", "hi");
    scenario.accuracy_dist = range;
  }
  if (j.contains("clamp_unattainable_accuracy"))
    scenario.clamp_unattainable_accuracy =
        j.at("clamp_unattainable_accuracy").get<bool>();
  if (j.contains("early_exit")) scenario.early_exit = j.at("early_exit").get<bool>();
  if (j.contains("config"))
    scenario.config = parse_config(j.at("config"), "config");
  if (j.contains("profile"))
    scenario.profile = parse_profile(j.at("profile"), "profile");
  try {
    validate(scenario);
  } catch (const std::domain_error& e) {
    throw SchemaError(std::string("scenario: ") + e.what());
  }
  return scenario;
}

Scenario load_scenario_file(const std::string& path) {
  return parse_scenario_json(read_text_file(path));
}

std::string scenario_to_json(const Scenario& scenario) {
  ordered_json j;
  j["scenario_id"] = scenario.scenario_id;
  j["arrival_rate"] = scenario.arrival_rate;
  j["duration_s"] = scenario.duration_s;
  j["seed"] = scenario.seed;
  j["avg_path_loss"] = scenario.avg_path_loss;
  j["snr_db"] = scenario.snr_db;
  j["feature_bits"] = scenario.feature_bits;
  j["deadline_s"] = json{{"lo", scenario.deadline_dist.lo},
                         {"hi", scenario.deadline_dist.hi}};
  if (!scenario.exit_weights.empty()) j["exit_weights"] = scenario.exit_weights;
  if (scenario.accuracy_dist) {
    j["accuracy_req"] = json{{"lo", scenario.accuracy_dist->lo},
                             {"hi", scenario.accuracy_dist->hi}};
  }
  j["clamp_unattainable_accuracy"] = scenario.clamp_unattainable_accuracy;
  j["early_exit"] = scenario.early_exit;
  j["config"] = config_to_json(scenario.config);
  j["profile"] = profile_to_json(scenario.profile);
  return j.dump(2) + "\n";
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

std::string metrics_csv_header() {
  return "scenario_id,policy,lambda,T,mean_acc,mean_lat,seed,generated,"
         "completed,dropped,completion_rate,nodes_visited";
}

std::string metrics_csv_row(const std::string& scenario_id,
                            const std::string& policy, double lambda,
                            double slot_s, const std::string& mean_acc,
                            double mean_lat, std::uint64_t seed,
                            const SimMetrics& metrics) {
  std::ostringstream row;
  row << scenario_id << ',' << policy << ',' << format_double(lambda) << ','
      << format_double(slot_s) << ',' << mean_acc << ','
      << format_double(mean_lat) << ',' << seed << ',' << metrics.generated
      << ',' << metrics.completed << ',' << metrics.dropped << ','
      << format_double(metrics.completion_rate) << ','
      << metrics.search.nodes_visited;
  return row.str();
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["tool_version"] = tool_version;
  j["command"] = command;
  ordered_json inputs_json = ordered_json::array();
  for (const auto& [path, hash] : inputs) {
    inputs_json.push_back(ordered_json{{"path", path}, {"sha256", hash}});
  }
  j["inputs"] = inputs_json;
  j["seeds"] = seeds;
  j["output_path"] = output_path;
  return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(static_cast<std::size_t>(length) * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace edgebatch
