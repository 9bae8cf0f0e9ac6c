#include "evenlab_app/cli.hpp"

#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "evenlab/errors.hpp"
#include "evenlab_app/config.hpp"
#include "evenlab_app/experiments.hpp"
#include "evenlab_app/report.hpp"

namespace evenlab::app {

namespace {

std::string kind_list() {
  std::string out;
  for (ExperimentKind k : all_kinds()) {
    if (!out.empty()) out += ", ";
    out += to_string(k);
  }
  return out;
}

const char* kind_help(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Intervals: return "Support intervals and the containment check";
    case ExperimentKind::InitSample: return "Sample every layer and audit its symmetry";
    case ExperimentKind::PathProb: return "Monte Carlo estimate of P(path active)";
    case ExperimentKind::CondWeights: return "Activity given clamped on-path weights";
    case ExperimentKind::CondInput: return "Activity given fixed inputs";
    case ExperimentKind::Independence: return "cond-weights and cond-input in one report";
    case ExperimentKind::DepthSweep: return "Activation probability against depth";
    case ExperimentKind::Landscape: return "Critical points of the expected-output loss";
    case ExperimentKind::McLoss: return "Monte Carlo loss against its closed form";
  }
  return "";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& err) {
  ExperimentConfig cfg;
  std::string experiment;
  std::string format = "json";
  std::string save_config;

  CLI::App app{"evenlab: path activity and loss landscape experiments for ReLU networks", "evenlab"};
  app.set_config("--config", "", "TOML file with long-flag keys; flags override it");
  app.require_subcommand(0, 1);

  app.add_option("--experiment", experiment, "Experiment when no subcommand is given: " + kind_list());
  app.add_option("--widths", cfg.widths, "Layer widths d_0,...,d_{H+1}")->delimiter(',');
  app.add_option("--scheme", cfg.scheme, "Initialization scheme token")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--stream", cfg.stream, "First stream id")->capture_default_str();
  app.add_option("--z", cfg.z, "Interval half-width in standard errors")->capture_default_str();
  app.add_option("--q", cfg.q, "Path scale q")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Input bound alpha")->capture_default_str();
  app.add_option("--input", cfg.input, "ones, alternating, ramp, sin, e1, or a comma list")->capture_default_str();
  app.add_option("--path", cfg.path, "Neuron chain j_0,...,j_H")->delimiter(',');
  app.add_option("--output-neuron", cfg.output_neuron, "Output unit of the path")->capture_default_str();
  app.add_option("--clamp", cfg.clamp, "extreme, or lambda_1,...,lambda_{H+1}")->capture_default_str();
  app.add_option("--clamp-output-bound", cfg.clamp_output_bound, "Bound on |lambda_{H+1}|")->capture_default_str();
  app.add_option("--clamp-tol", cfg.clamp_tol, "Allowed |p_hat - 2^-H| under clamps")->capture_default_str();
  app.add_option("--compare-width", cfg.compare_width, "Narrow width for the clamp comparison, 0 = off")
      ->capture_default_str();
  app.add_option("--mu", cfg.mu, "Conditioning input (repeatable)");
  app.add_option("--h-min", cfg.h_min, "Smallest hidden depth")->capture_default_str();
  app.add_option("--h-max", cfg.h_max, "Largest hidden depth")->capture_default_str();
  app.add_option("--slope-tol", cfg.slope_tol, "Allowed |slope + 1|")->capture_default_str();
  app.add_option("--fan-in", cfg.fan_in, "Fan-in values")->delimiter(',');
  app.add_option("--fan-out", cfg.fan_out, "Fan-out, 0 = same as fan-in")->capture_default_str();
  app.add_option("--containment-max", cfg.containment_max, "Containment sweep upper end")->capture_default_str();
  app.add_option("--patterns", cfg.patterns, "Training patterns")->capture_default_str();
  app.add_option("--data-seed", cfg.data_seed, "Seed of the synthetic dataset")->capture_default_str();
  app.add_option("--targets", cfg.targets, "random or realizable")->capture_default_str();
  app.add_option("--starts", cfg.starts, "Descent starts")->capture_default_str();
  app.add_option("--rho", cfg.rho, "Activation probability, 0 = 2^-H")->capture_default_str();
  app.add_option("--grad-rel", cfg.grad_rel, "Relative gradient tolerance")->capture_default_str();
  app.add_option("--eig-rel", cfg.eig_rel, "Relative eigenvalue tolerance")->capture_default_str();
  app.add_option("--gap-tol", cfg.gap_tol, "Allowed gap between a local minimum and the oracle")
      ->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "Descent iteration cap")->capture_default_str();
  app.add_option("--probes", cfg.probes, "Convexity probes")->capture_default_str();
  app.add_option("--out", cfg.out, "Output path, - for stdout")->capture_default_str();
  app.add_option("--format", format, "json or csv")->capture_default_str();
  app.add_flag("--record-wall-time", cfg.record_wall_time, "Add wall time to the report");
  app.add_option("--save-config", save_config, "Write the resolved config as TOML and exit");

  for (ExperimentKind k : all_kinds()) {
    app.add_subcommand(std::string(to_string(k)), kind_help(k))->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    err << "evenlab: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto subs = app.get_subcommands();
    if (!subs.empty()) {
      cfg.kind = parse_kind(subs.front()->get_name());
    } else if (!experiment.empty()) {
      cfg.kind = parse_kind(experiment);
    } else {
      err << "evenlab: no experiment given (subcommand or --experiment: " << kind_list() << ")\n";
      return kExitUsage;
    }
    cfg.format = parse_format(format);

    if (!save_config.empty()) {
      validate_config(cfg);
      write_output(save_config, to_toml(cfg));
      return kExitPass;
    }

    const RunResult result = run_experiment(cfg);
    const std::string text =
        cfg.format == OutputFormat::Csv ? emit_plot_table(result.report) : render_json(result.report) + "\n";
    write_output(cfg.out, text);
    return result.pass ? kExitPass : kExitVerdictFail;
  } catch (const CapacityError& e) {
    err << "evenlab: capacity: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const StructuralError& e) {
    err << "evenlab: structural: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "evenlab: invalid: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace evenlab::app
