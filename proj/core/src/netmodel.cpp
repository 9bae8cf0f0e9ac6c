#include "evenlab/netmodel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "evenlab/errors.hpp"

namespace evenlab {

namespace {

std::string shape_string(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

NetworkSpec::NetworkSpec(std::vector<std::size_t> widths, double path_scale, double input_bound)
    : widths_(std::move(widths)), path_scale_(path_scale), input_bound_(input_bound) {
  if (widths_.size() < 3) {
    throw_validation("NetworkSpec: need at least one hidden layer (got " +
                     std::to_string(widths_.size()) + " widths, expected H+2 >= 3)");
  }
  for (std::size_t k = 0; k < widths_.size(); ++k) {
    if (widths_[k] == 0) throw_validation("NetworkSpec: width d_" + std::to_string(k) + " is zero");
  }
  if (!(path_scale_ > 0.0) || !std::isfinite(path_scale_)) {
    throw_validation("NetworkSpec: path scale q must be a finite positive number");
  }
  if (!(input_bound_ > 0.0) || !std::isfinite(input_bound_)) {
    throw_validation("NetworkSpec: input bound alpha must be a finite positive number");
  }
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t total = 0;
  for (std::size_t k = 0; k + 1 < widths_.size(); ++k) total += widths_[k] * widths_[k + 1];
  return total;
}

NetworkSpec NetworkSpec::with_path_scale(double q) const {
  return NetworkSpec(widths_, q, input_bound_);
}

std::uint64_t NetworkSpec::path_count() const {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (std::size_t k = 0; k + 1 < widths_.size(); ++k) {
    const std::uint64_t d = widths_[k];
    if (total > kMax / d) return kMax;
    total *= d;
  }
  return total;
}

WeightSet zero_weights(const NetworkSpec& spec) {
  WeightSet w;
  for (std::size_t k = 0; k < spec.layer_count(); ++k) {
    w.layers.push_back(Matrix::Zero(static_cast<Eigen::Index>(spec.fan_out(k)),
                                    static_cast<Eigen::Index>(spec.fan_in(k))));
  }
  return w;
}

void validate_weights(const NetworkSpec& spec, const WeightSet& w) {
  if (w.layers.size() != spec.layer_count()) {
    throw_structural("WeightSet has " + std::to_string(w.layers.size()) + " layers, expected " +
                     std::to_string(spec.layer_count()));
  }
  for (std::size_t k = 0; k < w.layers.size(); ++k) {
    const Matrix& m = w.layers[k];
    const auto rows = static_cast<Eigen::Index>(spec.fan_out(k));
    const auto cols = static_cast<Eigen::Index>(spec.fan_in(k));
    if (m.rows() != rows || m.cols() != cols) {
      throw_structural("weight layer " + std::to_string(k) + " has shape " +
                       shape_string(m.rows(), m.cols()) + ", expected " + shape_string(rows, cols));
    }
    if (!m.allFinite()) throw_validation("weight layer " + std::to_string(k) + " has non-finite entries");
  }
}

void validate_input(const NetworkSpec& spec, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != spec.input_width()) {
    throw_structural("input has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(spec.input_width()));
  }
  const double alpha = spec.input_bound();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw_validation("input entry " + std::to_string(i) + " is not finite");
    if (std::fabs(x[i]) > alpha) {
      throw_validation("input entry " + std::to_string(i) + " = " + std::to_string(x[i]) +
                       " lies outside [-alpha, alpha] with alpha = " + std::to_string(alpha));
    }
  }
}

Dataset::Dataset(const NetworkSpec& spec, Matrix inputs, Matrix targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
  if (inputs_.cols() < 1) throw_validation("Dataset: need at least one pattern");
  if (static_cast<std::size_t>(inputs_.rows()) != spec.input_width()) {
    throw_structural("Dataset: inputs have " + std::to_string(inputs_.rows()) + " rows, expected d_x = " +
                     std::to_string(spec.input_width()));
  }
  if (static_cast<std::size_t>(targets_.rows()) != spec.output_width()) {
    throw_structural("Dataset: targets have " + std::to_string(targets_.rows()) + " rows, expected d_y = " +
                     std::to_string(spec.output_width()));
  }
  if (targets_.cols() != inputs_.cols()) {
    throw_structural("Dataset: " + std::to_string(inputs_.cols()) + " input columns but " +
                     std::to_string(targets_.cols()) + " target columns");
  }
  if (!targets_.allFinite()) throw_validation("Dataset: targets contain non-finite values");
  for (Eigen::Index i = 0; i < inputs_.cols(); ++i) {
    validate_input(spec, inputs_.col(i));
    if (inputs_.col(i).isZero(0.0)) {
      throw_validation("Dataset: input column " + std::to_string(i) + " is the zero vector");
    }
  }
}

void validate_path(const NetworkSpec& spec, const PathId& path) {
  if (path.output_neuron >= spec.output_width()) {
    throw_structural("path output neuron " + std::to_string(path.output_neuron) + " out of range [0, " +
                     std::to_string(spec.output_width()) + ")");
  }
  if (path.neuron_chain.size() != spec.hidden_depth() + 1) {
    throw_structural("path chain has " + std::to_string(path.neuron_chain.size()) +
                     " neurons, expected H+1 = " + std::to_string(spec.hidden_depth() + 1));
  }
  for (std::size_t k = 0; k < path.neuron_chain.size(); ++k) {
    if (path.neuron_chain[k] >= spec.widths()[k]) {
      throw_structural("path neuron j_" + std::to_string(k) + " = " + std::to_string(path.neuron_chain[k]) +
                       " out of range [0, " + std::to_string(spec.widths()[k]) + ")");
    }
  }
}

ForwardResult forward_relu(const NetworkSpec& spec, const WeightSet& w, const Vector& x) {
  validate_weights(spec, w);
  validate_input(spec, x);

  ForwardResult result;
  const std::size_t hidden = spec.hidden_depth();
  result.record.unit_net_inputs.reserve(hidden);
  result.record.unit_active.reserve(hidden);

  Vector signal = x;
  for (std::size_t k = 0; k < spec.layer_count(); ++k) {
    const Matrix& m = w.layers[k];
    Vector net(m.rows());
    for (Eigen::Index l = 0; l < m.rows(); ++l) {
      double u = 0.0;
      for (Eigen::Index j = 0; j < m.cols(); ++j) u += m(l, j) * signal[j];
      net[l] = u;
    }
    if (k + 1 == spec.layer_count()) {
      result.output = std::move(net);
      break;
    }
    std::vector<bool> active(static_cast<std::size_t>(net.size()));
    for (Eigen::Index l = 0; l < net.size(); ++l) active[l] = net[l] > 0.0;
    signal = net.cwiseMax(0.0);
    result.record.unit_net_inputs.push_back(std::move(net));
    result.record.unit_active.push_back(std::move(active));
  }
  return result;
}

std::vector<PathId> enumerate_paths(const NetworkSpec& spec, std::size_t output_neuron) {
  if (output_neuron >= spec.output_width()) {
    throw_structural("output neuron " + std::to_string(output_neuron) + " out of range [0, " +
                     std::to_string(spec.output_width()) + ")");
  }
  const std::uint64_t count = spec.path_count();
  if (count > kMaxEnumeratedPaths) {
    throw_capacity("path enumeration needs " + std::to_string(count) + " paths, cap is " +
                   std::to_string(kMaxEnumeratedPaths));
  }

  const std::size_t chain_len = spec.hidden_depth() + 1;
  std::vector<PathId> paths;
  paths.reserve(count);
  std::vector<std::size_t> chain(chain_len, 0);
  for (std::uint64_t p = 0; p < count; ++p) {
    paths.push_back(PathId{output_neuron, chain});
    // odometer increment, last position fastest
    for (std::size_t pos = chain_len; pos-- > 0;) {
      if (++chain[pos] < spec.widths()[pos]) break;
      chain[pos] = 0;
    }
  }
  return paths;
}

bool path_is_active(const ActivationRecord& record, const PathId& path) {
  const std::size_t hidden = record.unit_active.size();
  if (path.neuron_chain.size() != hidden + 1) {
    throw_structural("path chain has " + std::to_string(path.neuron_chain.size()) +
                     " neurons but the record covers " + std::to_string(hidden) + " hidden layers");
  }
  for (std::size_t k = 0; k < hidden; ++k) {
    const std::size_t unit = path.neuron_chain[k + 1];
    if (unit >= record.unit_active[k].size()) {
      throw_structural("path unit " + std::to_string(unit) + " out of range in hidden layer " +
                       std::to_string(k + 1));
    }
    if (!record.unit_active[k][unit]) return false;
  }
  return true;
}

std::vector<bool> path_activity(const ActivationRecord& record, const std::vector<PathId>& paths) {
  std::vector<bool> flags(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) flags[p] = path_is_active(record, paths[p]);
  return flags;
}

double path_weight_product(const WeightSet& w, const Vector& x, const PathId& path) {
  double value = x[static_cast<Eigen::Index>(path.neuron_chain.front())];
  for (std::size_t k = 0; k < w.layers.size(); ++k) {
    const std::size_t from = path.neuron_chain[k];
    const std::size_t to = k + 1 < path.neuron_chain.size() ? path.neuron_chain[k + 1] : path.output_neuron;
    value *= w.layers[k](static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
  }
  return value;
}

double path_sum_output(const NetworkSpec& spec, const WeightSet& w, const Vector& x,
                       const std::vector<bool>& active, std::size_t output_neuron) {
  validate_weights(spec, w);
  validate_input(spec, x);
  const std::vector<PathId> paths = enumerate_paths(spec, output_neuron);
  if (active.size() != paths.size()) {
    throw_structural("activity vector has " + std::to_string(active.size()) + " entries, expected " +
                     std::to_string(paths.size()) + " paths");
  }
  double sum = 0.0;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    if (active[p]) sum += path_weight_product(w, x, paths[p]);
  }
  return spec.path_scale() * sum;
}

}  // namespace evenlab
