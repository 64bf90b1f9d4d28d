#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcminimax/blocking.hpp"
#include "pcminimax/eigensolve.hpp"
#include "pcminimax/montecarlo.hpp"

namespace pcm {

/// Validation failure tied to a config field, e.g. "K: must be >= 1".
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : InvalidArgument(field + ": " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct PcCheckSettings {
  bool enabled = false;
  std::size_t paths = 10000;
  std::size_t u_grid = 8;
  std::size_t periods = 3;
};

struct OutputSettings {
  std::filesystem::path dir = "pcminimax_out";
  bool operator_csv = false;
  bool spectral_csv = false;
  bool trace_csv = false;
  bool path_csv = false;
  std::size_t spectral_grid = 256;
};

struct ExperimentConfig {
  WeightFunction weight;
  double period = 1.0;
  std::size_t K = 1;
  std::size_t J = 1;
  std::vector<std::size_t> horizons;  // N values, ascending
  double power = 1.0;
  std::size_t quad_nodes = 4096;
  TailModel tail;
  PowerIterationOptions eigen;
  MonteCarloOptions mc;
  PcCheckSettings pc_check;
  OutputSettings output;
};

/// Relative paths inside the document (weight CSV, output dir) resolve
/// against base_dir.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Default tail hint for a weight: geometric with ratio exp(-rate T) for an
/// unbounded exponential decay, finite otherwise.
TailModel default_tail(const WeightFunction& w, double period);

}  // namespace pcm
