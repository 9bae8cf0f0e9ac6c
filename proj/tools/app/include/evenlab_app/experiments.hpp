#pragma once

#include <cstddef>
#include <string>

#include "evenlab/landscape.hpp"
#include "evenlab/netmodel.hpp"
#include "evenlab_app/config.hpp"
#include "evenlab_app/report.hpp"

namespace evenlab::app {

struct RunResult {
  Json report;
  bool pass = false;
};

// Input vector of length n from a preset name ("ones", "alternating",
// "ramp", "sin", "e1"), scaled by alpha, or from a comma-separated list.
Vector parse_input(const std::string& spec, std::size_t n, double alpha);

// Dataset used by landscape and mc-loss: inputs uniform on [-alpha, alpha],
// targets uniform on [-1, 1] ("random") or q rho A x with rank A <= min width
// ("realizable").
Dataset make_dataset(const NetworkSpec& spec, const ExperimentConfig& cfg, const LossConfig& loss);

// Validates the config, dispatches to the experiment and assembles the
// report (config echo, rows, verdicts). Library errors propagate.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace evenlab::app
