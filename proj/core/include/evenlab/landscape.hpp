#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "evenlab/init.hpp"
#include "evenlab/netmodel.hpp"
#include "evenlab/rng.hpp"

namespace evenlab {

// Which loss the landscape tools evaluate:
//   ExpectedOutput  1/2 sum_i || E_Z[Y_hat_i] - Y_i ||^2  (deep-linear reduction)
//   MonteCarlo      1/2 sum_i E_Z || Y_hat_i - Y_i ||^2    (Z sampled per path)
enum class LossVariant { ExpectedOutput, MonteCarlo };

std::string_view to_string(LossVariant variant);

struct LossConfig {
  double rho = 0.5;  // P(Z = 1) for every path
  LossVariant variant = LossVariant::ExpectedOutput;

  // rho = 2^-H, the activation probability under even initialization.
  static LossConfig for_spec(const NetworkSpec& spec, LossVariant variant = LossVariant::ExpectedOutput);
};

// Throws ValidationError unless 0 < rho <= 1.
void validate_loss_config(const LossConfig& cfg);

// q * rho, the only way (q, rho) enter the expected-output loss.
double output_scale(const NetworkSpec& spec, const LossConfig& cfg);

// Product W_{H+1} ... W_1 (d_y x d_x).
Matrix end_to_end_map(const WeightSet& w);

// q * rho * W_{H+1} ... W_1 x.
Vector expected_output(const NetworkSpec& spec, const WeightSet& w, const Vector& x, const LossConfig& cfg);

// 1/2 sum_i || q rho A x_i - y_i ||^2. Requires the ExpectedOutput variant.
double expected_loss(const NetworkSpec& spec, const WeightSet& w, const Dataset& data, const LossConfig& cfg);

struct LossEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t trials = 0;
};

// Samples every [Z_i]_(j,p) i.i.d. Bernoulli(rho) per trial and averages
// 1/2 sum_i || Y_hat_i - y_i ||^2. Requires the MonteCarlo variant and
// path_count() within kMaxEnumeratedPaths.
LossEstimate monte_carlo_loss(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                              const LossConfig& cfg, std::uint64_t trials, const RngSeed& seed);

// E[monte-carlo loss] - expected loss = 1/2 q^2 rho (1 - rho) sum_{i,j,p} c_{ijp}^2,
// c_{ijp} the weight product of path p to output j for pattern i.
double bernoulli_variance_gap(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                              const LossConfig& cfg);

// Parameter vector: layer by layer, each layer row-major.
Vector flatten(const WeightSet& w);
WeightSet unflatten(const NetworkSpec& spec, const Vector& theta);

// Analytic gradient of expected_loss, one matrix per layer.
WeightSet gradient(const NetworkSpec& spec, const WeightSet& w, const Dataset& data, const LossConfig& cfg);

inline constexpr std::size_t kMaxHessianParameters = 200;

struct HessianResult {
  Matrix hessian;       // symmetric, over flatten() coordinates
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column i pairs with eigenvalues[i]
};

// Central differences of the analytic gradient with step
// h_i = 1e-5 (1 + |theta_i|), symmetrized. CapacityError past
// kMaxHessianParameters.
HessianResult hessian_fd(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                         const LossConfig& cfg);

// (L(theta + h d) - 2 L(theta) + L(theta - h d)) / h^2 for unit-norm d.
double directional_curvature(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                             const LossConfig& cfg, const Vector& direction, double step = 1e-3);

// Natural curvature unit (q rho)^2 * lambda_max(X X^T): eigenvalue tolerances
// scale with max(this, largest |eigenvalue|) so a flat spectrum does not
// shrink its own tolerance to zero.
double curvature_unit(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg);

struct ClassifyTolerances {
  double grad_rel = 1e-8;  // grad_tol = grad_rel * (1 + 1/2 ||Y||^2)
  double eig_rel = 1e-6;   // eig_tol = eig_rel * spectral scale
  std::size_t random_directions = 200;
  std::size_t step_count = 16;
  double step_max = 1e-1;
  double step_min = 1e-8;
  double descent_margin_rel = 1e-12;  // a probe must beat L by margin * (1 + |L|)
  std::uint64_t seed = 0x5eed;
};

enum class PointClass { LocalMinCandidate, Saddle, DegenerateSaddle, NotCritical };

std::string_view to_string(PointClass c);

struct CriticalPointReport {
  WeightSet theta;
  double loss = 0.0;
  double grad_norm = 0.0;
  double grad_tol = 0.0;
  Vector hessian_eigs;  // ascending
  double eig_tol = 0.0;
  PointClass classification = PointClass::NotCritical;
  bool descent_found = false;
  double descent_loss = 0.0;  // lowest probed loss (== loss when none found)
  double descent_step = 0.0;
  Vector descent_direction;   // empty when none found
};

// Gradient test, then Hessian spectrum, then (for spectra with nothing
// below -eig_tol) a seeded line-probe search for a descent direction.
CriticalPointReport classify_point(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                                   const LossConfig& cfg, const ClassifyTolerances& tol = {});

struct GlobalMinimum {
  double min_loss = 0.0;
  WeightSet witness;
  std::size_t rank_bound = 0;        // min_k d_k
  Vector singular_values;            // of the whitened least-squares fit
  double least_squares_residual = 0.0;  // 1/2 ||B_ls X - Y||^2, no rank limit
};

// Reduced-rank regression: least squares, then truncation to rank
// min_k d_k in the X X^T inner product, factored through the layer widths.
// ValidationError when the inputs do not have full row rank.
GlobalMinimum global_min_oracle(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg);

struct DescentOptions {
  std::size_t max_iterations = 50'000;
  double armijo = 1e-4;
  bool record_trace = false;
  ClassifyTolerances tol;
};

struct DescentRun {
  WeightSet theta;
  std::vector<double> loss_trace;  // loss after each accepted step (if recorded)
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  std::string_view stop_reason;
};

// Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.
DescentRun gradient_descent(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg,
                            WeightSet start, const DescentOptions& options = {});

struct MultistartEntry {
  std::size_t start_id = 0;
  DescentRun run;
  CriticalPointReport report;
};

struct MultistartResult {
  std::vector<MultistartEntry> entries;  // in start order
  GlobalMinimum oracle;
  std::size_t candidate_count = 0;
  double max_candidate_gap = 0.0;  // max over local-min-candidates of loss - oracle
  double gap_tolerance = 1e-6;
  bool pass = false;
};

inline constexpr double kDefaultGapTolerance = 1e-6;

// Start s is sample_weights(spec, scheme, RngSeed{seed, s}).
MultistartResult multistart_descent(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg,
                                    const InitScheme& scheme, std::size_t starts, std::uint64_t seed,
                                    const DescentOptions& options = {},
                                    double gap_tolerance = kDefaultGapTolerance);

struct ConvexityProbe {
  std::size_t probes = 0;
  double tolerance = 0.0;
  double min_curvature = 0.0;
  double max_curvature = 0.0;
  bool found_positive_curvature = false;
  bool found_negative_curvature = false;
};

// Random points (entries N(0, point_scale^2)) and unit directions; records
// the extreme second directional differences.
ConvexityProbe convexity_probe(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg,
                               std::size_t probes, std::uint64_t seed, double point_scale = 1.0,
                               double eig_rel = 1e-6);

}  // namespace evenlab
