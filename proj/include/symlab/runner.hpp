// Experiment runner: JSON configs in, CSV tables and a manifest out.
#pragma once

#include "symlab/kernel.hpp"
#include "symlab/measure.hpp"
#include "symlab/transport.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symlab {

struct MeasureSpec {
  /// flat | spike | lines | cantor | lattice_lines | tiling | atoms | table
  std::string generator;
  nlohmann::json params;
};

struct ExperimentConfig {
  MeasureSpec measure;
  /// {"name": riesz | huovinen | coordinate, ...}
  nlohmann::json kernel;
  std::vector<Vec> points;
  int sample_points = 0;
  std::uint64_t seed = 1;
  double r_max = 1;
  double ratio = 0.5;
  int count = 8;
  double s = 1;
  std::vector<double> taus{0.5};
  CandidateFamily family;
  SolverOptions solver;
  std::optional<double> theta_sla;
  std::optional<double> theta_defect;
  std::optional<double> theta_alpha;
  /// Alpha scans rebuild the measure at every radius with spacing r / h_ratio when set.
  std::optional<double> rediscretize_ratio;
  std::string output_dir = "out";
  int threads = 1;
  /// Subcommand sections (pv, blowup, multiplier, verify).
  nlohmann::json sections = nlohmann::json::object();
  nlohmann::json source;
};

/// Parses and validates a config. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

Measure build_measure(const MeasureSpec& spec);
/// The generator rebuilt with spacing h (ignored for atoms and tables).
Measure build_measure(const MeasureSpec& spec, double h);
Kernel build_kernel(const nlohmann::json& spec);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, bool>> verdicts;
  double wall_clock = 0;

  std::string to_json() const;
};

/// Runs one subcommand: gen, sla, alpha, pv, defect, density, multiplier, blowup, verify.
RunManifest run(const std::string& command, const ExperimentConfig& config);

}  // namespace symlab
