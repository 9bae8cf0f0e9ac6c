#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evenlab::app {

enum class ExperimentKind {
  Intervals,
  InitSample,
  PathProb,
  CondWeights,
  CondInput,
  Independence,
  DepthSweep,
  Landscape,
  McLoss,
};

std::string_view to_string(ExperimentKind kind);
// Throws ValidationError naming the field for unknown kinds.
ExperimentKind parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

enum class OutputFormat { Json, Csv };

std::string_view to_string(OutputFormat format);
OutputFormat parse_format(std::string_view name);

// Everything one run depends on. Keys of to_json/to_toml are the long flag
// names, so an echoed config is a valid --config file.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PathProb;

  std::vector<std::size_t> widths;  // empty: per-experiment default
  std::string scheme = "even-uniform";
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;
  double z = 4.0;
  double q = 1.0;
  double alpha = 1.0;

  // "ones", "alternating", "ramp", "sin", "e1" or a comma list of numbers
  std::string input = "ramp";
  std::vector<std::size_t> path;  // neuron chain j_0..j_H; empty: all zeros
  std::size_t output_neuron = 0;

  // cond-weights
  std::string clamp = "extreme";  // or a comma list lambda_1..lambda_{H+1}
  double clamp_output_bound = 1.0;
  double clamp_tol = 0.02;
  std::size_t compare_width = 4;  // 0 disables the narrow-width comparison

  // cond-input: input specs as for `input`; empty: five built-in inputs
  std::vector<std::string> mu;

  // depth-sweep
  std::size_t h_min = 1;
  std::size_t h_max = 4;
  double slope_tol = 0.05;

  // intervals
  std::vector<std::size_t> fan_in = {100};
  std::size_t fan_out = 0;  // 0: same as fan-in
  std::size_t containment_max = 1'000'000;

  // landscape and mc-loss
  std::size_t patterns = 6;
  std::uint64_t data_seed = 7;
  std::string targets = "random";  // or "realizable"
  std::size_t starts = 50;
  double rho = 0.0;  // 0: 2^-H
  double grad_rel = 1e-8;
  double eig_rel = 1e-6;
  double gap_tol = 1e-6;
  std::size_t max_iter = 50'000;
  std::size_t probes = 200;

  std::string out = "-";
  OutputFormat format = OutputFormat::Json;
  bool record_wall_time = false;
};

// Widths used when the config leaves them empty.
std::vector<std::size_t> default_widths(ExperimentKind kind);
std::vector<std::size_t> resolved_widths(const ExperimentConfig& cfg);

// Field-level checks; messages start with the offending key.
void validate_config(const ExperimentConfig& cfg);

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
std::string to_toml(const ExperimentConfig& cfg);

}  // namespace evenlab::app
