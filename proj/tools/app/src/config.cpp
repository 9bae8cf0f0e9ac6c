#include "evenlab_app/config.hpp"

#include <algorithm>

#include "evenlab/errors.hpp"
#include "evenlab/init.hpp"
#include "evenlab_app/report.hpp"

namespace evenlab::app {

namespace {

struct KindName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::Intervals, "intervals"},       {ExperimentKind::InitSample, "init-sample"},
    {ExperimentKind::PathProb, "path-prob"},        {ExperimentKind::CondWeights, "cond-weights"},
    {ExperimentKind::CondInput, "cond-input"},      {ExperimentKind::Independence, "independence"},
    {ExperimentKind::DepthSweep, "depth-sweep"},    {ExperimentKind::Landscape, "landscape"},
    {ExperimentKind::McLoss, "mc-loss"},
};

[[noreturn]] void fail(std::string_view field, const std::string& what) {
  throw_validation("config." + std::string(field) + ": " + what);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  fail("experiment", "unknown experiment '" + std::string(name) + "'");
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> out;
    for (const auto& entry : kKindNames) out.push_back(entry.kind);
    return out;
  }();
  return kinds;
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Json ? "json" : "csv"; }

OutputFormat parse_format(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  fail("format", "expected json or csv, got '" + std::string(name) + "'");
}

std::vector<std::size_t> default_widths(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Intervals:
      return {};
    case ExperimentKind::InitSample:
      return {100, 100, 1};
    case ExperimentKind::PathProb:
    case ExperimentKind::CondWeights:
    case ExperimentKind::CondInput:
    case ExperimentKind::Independence:
      return {64, 64, 64, 1};
    case ExperimentKind::DepthSweep:
      return {64, 64, 1};
    case ExperimentKind::Landscape:
      return {2, 2, 2};
    case ExperimentKind::McLoss:
      return {3, 2, 2, 1};
  }
  return {};
}

std::vector<std::size_t> resolved_widths(const ExperimentConfig& cfg) {
  return cfg.widths.empty() ? default_widths(cfg.kind) : cfg.widths;
}

void validate_config(const ExperimentConfig& cfg) {
  const std::vector<std::size_t> widths = resolved_widths(cfg);
  if (cfg.kind != ExperimentKind::Intervals) {
    if (widths.size() < 3) fail("widths", "need at least 3 entries (input, hidden..., output)");
    if (std::find(widths.begin(), widths.end(), 0) != widths.end()) fail("widths", "every width must be >= 1");
  }
  try {
    (void)InitScheme::parse(cfg.scheme);
  } catch (const ValidationError& e) {
    fail("scheme", e.what());
  }
  if (cfg.trials == 0) fail("trials", "must be positive");
  if (!(cfg.z > 0.0)) fail("z", "must be positive");
  if (!(cfg.q > 0.0)) fail("q", "must be positive");
  if (!(cfg.alpha > 0.0)) fail("alpha", "must be positive");
  if (!cfg.path.empty() && cfg.path.size() + 1 != widths.size()) {
    fail("path", "needs H+1 = " + std::to_string(widths.size() - 1) + " neuron indices");
  }
  if (!(cfg.clamp_tol > 0.0)) fail("clamp-tol", "must be positive");
  if (!(cfg.clamp_output_bound > 0.0)) fail("clamp-output-bound", "must be positive");
  if (cfg.compare_width == 1) fail("compare-width", "must be 0 (off) or >= 2");
  if (cfg.h_min < 1 || cfg.h_max < cfg.h_min) fail("h-min", "need 1 <= h-min <= h-max");
  if (!(cfg.slope_tol > 0.0)) fail("slope-tol", "must be positive");
  if (cfg.kind == ExperimentKind::Intervals) {
    if (cfg.fan_in.empty()) fail("fan-in", "needs at least one value");
    if (std::find(cfg.fan_in.begin(), cfg.fan_in.end(), 0) != cfg.fan_in.end()) fail("fan-in", "must be >= 1");
  }
  if (cfg.patterns == 0) fail("patterns", "must be positive");
  if (cfg.targets != "random" && cfg.targets != "realizable") {
    fail("targets", "expected random or realizable, got '" + cfg.targets + "'");
  }
  if (cfg.starts == 0) fail("starts", "must be positive");
  if (cfg.rho < 0.0 || cfg.rho > 1.0) fail("rho", "must lie in (0, 1], or 0 for 2^-H");
  if (!(cfg.grad_rel > 0.0)) fail("grad-rel", "must be positive");
  if (!(cfg.eig_rel > 0.0)) fail("eig-rel", "must be positive");
  if (!(cfg.gap_tol > 0.0)) fail("gap-tol", "must be positive");
  if (cfg.max_iter == 0) fail("max-iter", "must be positive");
  if (cfg.probes == 0) fail("probes", "must be positive");
  if (cfg.out.empty()) fail("out", "must be a path or '-'");
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.kind);
  j["widths"] = resolved_widths(cfg);
  j["scheme"] = InitScheme::parse(cfg.scheme).token();
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["stream"] = cfg.stream;
  j["z"] = cfg.z;
  j["q"] = cfg.q;
  j["alpha"] = cfg.alpha;
  j["input"] = cfg.input;
  j["path"] = cfg.path;
  j["output-neuron"] = cfg.output_neuron;
  j["clamp"] = cfg.clamp;
  j["clamp-output-bound"] = cfg.clamp_output_bound;
  j["clamp-tol"] = cfg.clamp_tol;
  j["compare-width"] = cfg.compare_width;
  j["mu"] = cfg.mu;
  j["h-min"] = cfg.h_min;
  j["h-max"] = cfg.h_max;
  j["slope-tol"] = cfg.slope_tol;
  j["fan-in"] = cfg.fan_in;
  j["fan-out"] = cfg.fan_out;
  j["containment-max"] = cfg.containment_max;
  j["patterns"] = cfg.patterns;
  j["data-seed"] = cfg.data_seed;
  j["targets"] = cfg.targets;
  j["starts"] = cfg.starts;
  j["rho"] = cfg.rho;
  j["grad-rel"] = cfg.grad_rel;
  j["eig-rel"] = cfg.eig_rel;
  j["gap-tol"] = cfg.gap_tol;
  j["max-iter"] = cfg.max_iter;
  j["probes"] = cfg.probes;
  j["format"] = to_string(cfg.format);
  j["record-wall-time"] = cfg.record_wall_time;
  return j;
}

std::string to_toml(const ExperimentConfig& cfg) {
  const nlohmann::ordered_json j = to_json(cfg);
  std::string out;
  for (const auto& [key, value] : j.items()) {
    // an empty list means "use the default", which is also what omitting it does
    if (value.is_array() && value.empty()) continue;
    out += key;
    out += " = ";
    out += render_json(value, -1);
    out += '\n';
  }
  return out;
}

}  // namespace evenlab::app
