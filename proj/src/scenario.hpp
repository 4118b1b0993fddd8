#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fp_dynamics.hpp"
#include "model.hpp"
#include "time_series.hpp"

namespace nhqm {

enum class ScenarioName { eigenfunctions, wide_norm, narrow_norm, mean_position, phase_reality };

const char* to_string(ScenarioName s) noexcept;
ScenarioName scenario_from_string(const std::string& s);

struct ScenarioConfig {
  ScenarioName scenario = ScenarioName::wide_norm;
  PotentialParams params;
  double theta = 0.3;
  std::optional<double> theta_alt;  // second angle for the theta-independence check
  int grid_n = 1024;
  double grid_l = 100.0;
  int herm_grid_n = 4096;
  double herm_grid_l = 400.0;
  double dt = 5e-4;
  double t_min = 0.0;
  double t_max = 240.0;
  int n_samples = 241;
  std::optional<double> region_a;  // full width; empty means auto
  WavepacketSpec wavepacket;
  std::string out_dir;
  bool strict = false;

  /// Sample times t_min + i (t_max - t_min) / (n_samples - 1).
  std::vector<double> sample_times() const;
  bool needs_propagation() const noexcept;
};

/// Flat key=value text, '#' starts a comment. Unknown or repeated keys,
/// malformed values and missing scenario are errors naming the line.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ScenarioConfig load_config(const std::string& path);

/// Checks every precondition the run will hit (grids, angle, wavepacket
/// resolution, step size, sample stride, wrap-around, region) without
/// diagonalizing or propagating.
void validate_config(const ScenarioConfig& cfg);

/// Classical time for the packet's momentum spread 1/(sqrt(2) sigma m) to
/// carry it from x0 to the barrier top.
double transient_cutoff(const WavepacketSpec& spec, double barrier_x, double mass);

struct ScenarioResult {
  bool passed = false;
  nlohmann::ordered_json report;
  std::vector<std::string> files;
};

/// Validates, computes, writes CSVs and report.json into cfg.out_dir.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

nlohmann::ordered_json to_json(const ComparisonReport& r);

}  // namespace nhqm
