#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace evenlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Path enumeration is exponential in depth; beyond this many paths per
// output neuron callers must work with the layer-wise pass instead.
inline constexpr std::uint64_t kMaxEnumeratedPaths = 1'000'000;

// Bias-free network: ReLU on every hidden layer, identity on the output.
//
// widths = {d_0, d_1, ..., d_H, d_{H+1}} with d_0 the input width and
// d_{H+1} the output width. Weight layer k (0-based) maps layer k onto
// layer k+1, so it has shape d_{k+1} x d_k and fan-in d_k.
class NetworkSpec {
 public:
  explicit NetworkSpec(std::vector<std::size_t> widths, double path_scale = 1.0,
                       double input_bound = 1.0);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t hidden_depth() const { return widths_.size() - 2; }
  std::size_t layer_count() const { return widths_.size() - 1; }
  std::size_t input_width() const { return widths_.front(); }
  std::size_t output_width() const { return widths_.back(); }
  std::size_t fan_in(std::size_t layer) const { return widths_.at(layer); }
  std::size_t fan_out(std::size_t layer) const { return widths_.at(layer + 1); }
  std::size_t parameter_count() const;

  // q: constant multiplying every path contribution.
  double path_scale() const { return path_scale_; }
  // alpha: inputs must lie in [-alpha, alpha].
  double input_bound() const { return input_bound_; }

  NetworkSpec with_path_scale(double q) const;

  // Number of input-to-output paths ending at one output neuron,
  // d_0 * d_1 * ... * d_H, saturating at UINT64_MAX.
  std::uint64_t path_count() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

 private:
  std::vector<std::size_t> widths_;
  double path_scale_;
  double input_bound_;
};

// All weight matrices of one network, layer k of shape d_{k+1} x d_k.
struct WeightSet {
  std::vector<Matrix> layers;
};

WeightSet zero_weights(const NetworkSpec& spec);

// Throws StructuralError on a shape mismatch and ValidationError on a
// non-finite entry.
void validate_weights(const NetworkSpec& spec, const WeightSet& w);

// Throws ValidationError unless x has d_0 finite entries inside
// [-alpha, alpha] (StructuralError on a length mismatch).
void validate_input(const NetworkSpec& spec, const Vector& x);

// Training data: column i of inputs/targets is pattern i.
class Dataset {
 public:
  Dataset(const NetworkSpec& spec, Matrix inputs, Matrix targets);

  const Matrix& inputs() const { return inputs_; }
  const Matrix& targets() const { return targets_; }
  std::size_t count() const { return static_cast<std::size_t>(inputs_.cols()); }

 private:
  Matrix inputs_;
  Matrix targets_;
};

// A path to output neuron `output_neuron`: neuron_chain = (j_0, ..., j_H),
// one neuron per non-output layer.
struct PathId {
  std::size_t output_neuron = 0;
  std::vector<std::size_t> neuron_chain;

  friend bool operator==(const PathId&, const PathId&) = default;
};

// Throws StructuralError unless the path indexes valid neurons of spec.
void validate_path(const NetworkSpec& spec, const PathId& path);

// Net inputs U and activity flags (U > 0, strict) of every hidden unit.
// Index [k][l] is hidden layer k+1, unit l.
struct ActivationRecord {
  std::vector<Vector> unit_net_inputs;
  std::vector<std::vector<bool>> unit_active;
};

struct ForwardResult {
  Vector output;
  ActivationRecord record;
};

// Layer-wise pass psi(W_H+1 phi(... phi(W_1 x))). The path scale q is not
// applied here. Dot products accumulate in ascending input-index order.
ForwardResult forward_relu(const NetworkSpec& spec, const WeightSet& w, const Vector& x);

// All paths to `output_neuron` in lexicographic order of neuron_chain.
// Throws CapacityError when path_count() exceeds kMaxEnumeratedPaths.
std::vector<PathId> enumerate_paths(const NetworkSpec& spec, std::size_t output_neuron);

// True iff every hidden unit on the path has strictly positive net input.
bool path_is_active(const ActivationRecord& record, const PathId& path);

// Activity flags of `paths`, in order.
std::vector<bool> path_activity(const ActivationRecord& record, const std::vector<PathId>& paths);

// x[j_0] times the product of the H+1 weights on the path (no q, no Z).
double path_weight_product(const WeightSet& w, const Vector& x, const PathId& path);

// q * sum_p x[j_0(p)] * [active_p] * prod_k w_{j_k j_{k-1}}, paths taken
// in enumerate_paths order.
double path_sum_output(const NetworkSpec& spec, const WeightSet& w, const Vector& x,
                       const std::vector<bool>& active, std::size_t output_neuron);

}  // namespace evenlab
