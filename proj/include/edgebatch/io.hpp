#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgebatch/model.hpp"
#include "edgebatch/sim.hpp"

namespace edgebatch {

/// Input-file problem; the message names the offending field.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& message)
      : std::runtime_error(message) {}
};

Instance load_instance_file(const std::string& path);
Instance parse_instance_json(const std::string& text);
std::string instance_to_json(const Instance& instance);

Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Stable float formatting for CSV output (byte-identical across runs).
std::string format_double(double value);

/// Header for per-run metrics rows.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& scenario_id,
                            const std::string& policy, double lambda,
                            double slot_s, const std::string& mean_acc,
                            double mean_lat, std::uint64_t seed,
                            const SimMetrics& metrics);

/// Record tying an output CSV to the exact inputs that produced it.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<std::uint64_t> seeds;
  std::string output_path;

  std::string to_json() const;
};

std::string sha256_hex(const std::string& bytes);

extern const char* const kToolVersion;

}  // namespace edgebatch
