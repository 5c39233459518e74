#pragma once

#include <map>
#include <string>
#include <vector>

#include "mkv/core.hpp"

namespace mkv {

// Raised for malformed configuration input (CLI exit code 2); solver and
// runtime failures surface as std::runtime_error (exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value experiment configuration with explicit schema versioning.
struct ExperimentConfig {
  std::map<std::string, std::string> kv;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text);

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num_or(const std::string& key, double fallback) const;
  long integer_or(const std::string& key, long fallback) const;
  std::vector<double> num_list(const std::string& key) const;

  // canonical sorted key=value text and its FNV-1a hash
  std::string canonical() const;
  std::string hash() const;
};

struct RunRow {
  double sweep_value = 0.0;
  std::string method;
  double estimate = 0.0;
  double std_error = 0.0;
  double runtime_s = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;  // solver metadata
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<RunRow> rows;
  std::vector<std::string> notes;
};

// Runs the configured experiment (optionally sweeping one parameter), writes
// the result CSV to the configured output path and returns the report.
RunReport run_experiment(const ExperimentConfig& cfg);

// Sample-trajectory CSV in long format (path, step, t, state..., control).
void emit_paths(const ExperimentConfig& cfg, int count, const std::string& out_path);

}  // namespace mkv
