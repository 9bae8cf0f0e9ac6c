#include "evenlab/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "evenlab/errors.hpp"
#include "evenlab/parallel.hpp"
#include "evenlab/stats.hpp"

namespace evenlab {

std::string_view to_string(LossVariant variant) {
  return variant == LossVariant::ExpectedOutput ? "expected-output" : "monte-carlo";
}

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::LocalMinCandidate: return "local-min-candidate";
    case PointClass::Saddle: return "saddle";
    case PointClass::DegenerateSaddle: return "degenerate-saddle";
    case PointClass::NotCritical: return "not-critical";
  }
  return "unknown";
}

LossConfig LossConfig::for_spec(const NetworkSpec& spec, LossVariant variant) {
  return LossConfig{std::ldexp(1.0, -static_cast<int>(spec.hidden_depth())), variant};
}

void validate_loss_config(const LossConfig& cfg) {
  if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) {
    throw_validation("loss config: rho = " + std::to_string(cfg.rho) + " must lie in (0, 1]");
  }
}

double output_scale(const NetworkSpec& spec, const LossConfig& cfg) { return spec.path_scale() * cfg.rho; }

Matrix end_to_end_map(const WeightSet& w) {
  Matrix a = w.layers.front();
  for (std::size_t k = 1; k < w.layers.size(); ++k) a = w.layers[k] * a;
  return a;
}

Vector expected_output(const NetworkSpec& spec, const WeightSet& w, const Vector& x, const LossConfig& cfg) {
  validate_loss_config(cfg);
  validate_weights(spec, w);
  validate_input(spec, x);
  return output_scale(spec, cfg) * (end_to_end_map(w) * x);
}

namespace {

void require_variant(const LossConfig& cfg, LossVariant variant, const char* op) {
  validate_loss_config(cfg);
  if (cfg.variant != variant) {
    throw_validation(std::string(op) + " requires the " + std::string(to_string(variant)) +
                     " loss variant, got " + std::string(to_string(cfg.variant)));
  }
}

// Residual c A X - Y for all patterns at once.
Matrix residuals(const WeightSet& w, const Dataset& data, double c) {
  return c * (end_to_end_map(w) * data.inputs()) - data.targets();
}

double loss_unchecked(const WeightSet& w, const Dataset& data, double c) {
  return 0.5 * residuals(w, data, c).squaredNorm();
}

WeightSet gradient_unchecked(const WeightSet& w, const Dataset& data, double c) {
  const std::size_t layers = w.layers.size();
  // prefix[k] = W_{k-1} ... W_0 (identity for k = 0)
  std::vector<Matrix> prefix(layers);
  prefix[0] = Matrix::Identity(w.layers[0].cols(), w.layers[0].cols());
  for (std::size_t k = 1; k < layers; ++k) prefix[k] = w.layers[k - 1] * prefix[k - 1];
  const Matrix a = w.layers[layers - 1] * prefix[layers - 1];

  const Matrix g = c * ((c * (a * data.inputs()) - data.targets()) * data.inputs().transpose());

  WeightSet grad;
  grad.layers.resize(layers);
  Matrix suffix = Matrix::Identity(w.layers[layers - 1].rows(), w.layers[layers - 1].rows());
  for (std::size_t k = layers; k-- > 0;) {
    grad.layers[k] = suffix.transpose() * g * prefix[k].transpose();
    suffix = suffix * w.layers[k];
  }
  return grad;
}

Vector gaussian_vector(const CounterRng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal_quantile(rng.uniform(static_cast<std::uint64_t>(i)));
  return v;
}

Vector unit_gaussian(const CounterRng& rng, Eigen::Index n) {
  Vector v = gaussian_vector(rng, n);
  const double norm = v.norm();
  return norm > 0.0 ? Vector(v / norm) : Vector(Vector::Unit(n, 0));
}

double loss_at(const NetworkSpec& spec, const Vector& theta, const Dataset& data, double c) {
  return loss_unchecked(unflatten(spec, theta), data, c);
}

}  // namespace

double expected_loss(const NetworkSpec& spec, const WeightSet& w, const Dataset& data, const LossConfig& cfg) {
  require_variant(cfg, LossVariant::ExpectedOutput, "expected_loss");
  validate_weights(spec, w);
  return loss_unchecked(w, data, output_scale(spec, cfg));
}

namespace {

// contributions[i][j][p] = x_i[j_0] * prod of weights on path p to output j.
std::vector<std::vector<std::vector<double>>> path_contributions(const NetworkSpec& spec, const WeightSet& w,
                                                                 const Dataset& data) {
  std::vector<std::vector<PathId>> paths_by_output;
  for (std::size_t j = 0; j < spec.output_width(); ++j) paths_by_output.push_back(enumerate_paths(spec, j));
  std::vector<std::vector<std::vector<double>>> out(data.count());
  for (std::size_t i = 0; i < data.count(); ++i) {
    const Vector x = data.inputs().col(static_cast<Eigen::Index>(i));
    out[i].resize(spec.output_width());
    for (std::size_t j = 0; j < spec.output_width(); ++j) {
      auto& row = out[i][j];
      row.reserve(paths_by_output[j].size());
      for (const PathId& p : paths_by_output[j]) row.push_back(path_weight_product(w, x, p));
    }
  }
  return out;
}

}  // namespace

LossEstimate monte_carlo_loss(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                              const LossConfig& cfg, std::uint64_t trials, const RngSeed& seed) {
  require_variant(cfg, LossVariant::MonteCarlo, "monte_carlo_loss");
  validate_weights(spec, w);
  if (trials == 0) throw_validation("monte_carlo_loss: trials must be positive");
  const auto contrib = path_contributions(spec, w, data);
  const double q = spec.path_scale();
  const std::uint64_t paths = spec.path_count();

  std::vector<double> per_trial(trials);
  parallel_chunks(trials, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const CounterRng rng(RngSeed{seed.master_seed, seed.stream_id + t});
      double loss = 0.0;
      for (std::size_t i = 0; i < contrib.size(); ++i) {
        for (std::size_t j = 0; j < contrib[i].size(); ++j) {
          const std::uint64_t base = (static_cast<std::uint64_t>(i) * spec.output_width() + j) * paths;
          double sum = 0.0;
          for (std::uint64_t p = 0; p < paths; ++p) {
            if (rng.uniform(base + p) < cfg.rho) sum += contrib[i][j][p];
          }
          const double r = q * sum - data.targets()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
          loss += r * r;
        }
      }
      per_trial[t] = 0.5 * loss;
    }
  });

  RunningMoments moments;
  for (double v : per_trial) moments.push(v);
  return LossEstimate{moments.mean(), moments.standard_error(), trials};
}

double bernoulli_variance_gap(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                              const LossConfig& cfg) {
  validate_loss_config(cfg);
  validate_weights(spec, w);
  const auto contrib = path_contributions(spec, w, data);
  double total = 0.0;
  for (const auto& pattern : contrib) {
    for (const auto& output : pattern) {
      for (double c : output) total += c * c;
    }
  }
  const double q = spec.path_scale();
  return 0.5 * q * q * cfg.rho * (1.0 - cfg.rho) * total;
}

Vector flatten(const WeightSet& w) {
  Eigen::Index n = 0;
  for (const Matrix& m : w.layers) n += m.size();
  Vector theta(n);
  Eigen::Index pos = 0;
  for (const Matrix& m : w.layers) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) theta[pos++] = m(r, c);
    }
  }
  return theta;
}

WeightSet unflatten(const NetworkSpec& spec, const Vector& theta) {
  if (static_cast<std::size_t>(theta.size()) != spec.parameter_count()) {
    throw_structural("parameter vector has " + std::to_string(theta.size()) + " entries, expected " +
                     std::to_string(spec.parameter_count()));
  }
  WeightSet w = zero_weights(spec);
  Eigen::Index pos = 0;
  for (Matrix& m : w.layers) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = theta[pos++];
    }
  }
  return w;
}

WeightSet gradient(const NetworkSpec& spec, const WeightSet& w, const Dataset& data, const LossConfig& cfg) {
  require_variant(cfg, LossVariant::ExpectedOutput, "gradient");
  validate_weights(spec, w);
  return gradient_unchecked(w, data, output_scale(spec, cfg));
}

HessianResult hessian_fd(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                         const LossConfig& cfg) {
  require_variant(cfg, LossVariant::ExpectedOutput, "hessian_fd");
  validate_weights(spec, w);
  const std::size_t n = spec.parameter_count();
  if (n > kMaxHessianParameters) {
    throw_capacity("hessian_fd: " + std::to_string(n) + " parameters exceed the dense budget of " +
                   std::to_string(kMaxHessianParameters));
  }
  const double c = output_scale(spec, cfg);
  const Vector theta = flatten(w);
  Matrix h(theta.size(), theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double step = 1e-5 * (1.0 + std::fabs(theta[i]));
    Vector plus = theta, minus = theta;
    plus[i] += step;
    minus[i] -= step;
    const Vector gp = flatten(gradient_unchecked(unflatten(spec, plus), data, c));
    const Vector gm = flatten(gradient_unchecked(unflatten(spec, minus), data, c));
    h.row(i) = ((gp - gm) / (plus[i] - minus[i])).transpose();
  }
  HessianResult result;
  result.hessian = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(result.hessian);
  result.eigenvalues = eig.eigenvalues();
  result.eigenvectors = eig.eigenvectors();
  return result;
}

double directional_curvature(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                             const LossConfig& cfg, const Vector& direction, double step) {
  require_variant(cfg, LossVariant::ExpectedOutput, "directional_curvature");
  validate_weights(spec, w);
  if (static_cast<std::size_t>(direction.size()) != spec.parameter_count()) {
    throw_structural("direction has " + std::to_string(direction.size()) + " entries, expected " +
                     std::to_string(spec.parameter_count()));
  }
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw_validation("directional_curvature: zero direction");
  const Vector d = direction / norm;
  const double c = output_scale(spec, cfg);
  const Vector theta = flatten(w);
  const double f0 = loss_unchecked(w, data, c);
  const double fp = loss_at(spec, theta + step * d, data, c);
  const double fm = loss_at(spec, theta - step * d, data, c);
  return (fp - 2.0 * f0 + fm) / (step * step);
}

double curvature_unit(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg) {
  const double c = output_scale(spec, cfg);
  const Matrix sxx = data.inputs() * data.inputs().transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sxx, Eigen::EigenvaluesOnly);
  return c * c * eig.eigenvalues().maxCoeff();
}

CriticalPointReport classify_point(const NetworkSpec& spec, const WeightSet& w, const Dataset& data,
                                   const LossConfig& cfg, const ClassifyTolerances& tol) {
  require_variant(cfg, LossVariant::ExpectedOutput, "classify_point");
  validate_weights(spec, w);
  const double c = output_scale(spec, cfg);

  CriticalPointReport report;
  report.theta = w;
  report.loss = loss_unchecked(w, data, c);
  report.grad_norm = flatten(gradient_unchecked(w, data, c)).norm();
  report.grad_tol = tol.grad_rel * (1.0 + 0.5 * data.targets().squaredNorm());

  const HessianResult hess = hessian_fd(spec, w, data, cfg);
  report.hessian_eigs = hess.eigenvalues;
  const double spectral_scale =
      std::max(hess.eigenvalues.cwiseAbs().maxCoeff(), curvature_unit(spec, data, cfg));
  report.eig_tol = tol.eig_rel * spectral_scale;
  report.descent_loss = report.loss;

  if (report.grad_norm > report.grad_tol) {
    report.classification = PointClass::NotCritical;
    return report;
  }

  // Candidate directions: eigenvectors that are negative or flat, then
  // seeded random unit directions.
  std::vector<Vector> directions;
  for (Eigen::Index i = 0; i < hess.eigenvalues.size(); ++i) {
    if (hess.eigenvalues[i] <= report.eig_tol) directions.push_back(hess.eigenvectors.col(i));
  }
  const CounterRng rng(RngSeed{tol.seed, 0});
  const auto n = static_cast<Eigen::Index>(spec.parameter_count());
  for (std::size_t r = 0; r < tol.random_directions; ++r) directions.push_back(unit_gaussian(rng.substream(r), n));

  const Vector theta = flatten(w);
  const double threshold = report.loss - tol.descent_margin_rel * (1.0 + std::fabs(report.loss));
  const double ratio =
      tol.step_count > 1 ? std::pow(tol.step_min / tol.step_max, 1.0 / static_cast<double>(tol.step_count - 1))
                         : 1.0;
  for (const Vector& d : directions) {
    double step = tol.step_max;
    for (std::size_t s = 0; s < tol.step_count; ++s, step *= ratio) {
      for (double sign : {1.0, -1.0}) {
        const double probe = loss_at(spec, theta + (sign * step) * d, data, c);
        if (probe < threshold && probe < report.descent_loss) {
          report.descent_found = true;
          report.descent_loss = probe;
          report.descent_step = step;
          report.descent_direction = sign * d;
        }
      }
    }
  }

  const bool negative = hess.eigenvalues[0] < -report.eig_tol;
  if (report.descent_found) {
    report.classification = negative ? PointClass::Saddle : PointClass::DegenerateSaddle;
  } else {
    report.classification = PointClass::LocalMinCandidate;
  }
  return report;
}

GlobalMinimum global_min_oracle(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg) {
  require_variant(cfg, LossVariant::ExpectedOutput, "global_min_oracle");
  const Matrix& x = data.inputs();
  const Matrix& y = data.targets();
  const double c = output_scale(spec, cfg);

  const Matrix sxx = x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> sxx_eig(sxx);
  const Vector evals = sxx_eig.eigenvalues();
  if (!(evals.minCoeff() > 1e-12 * std::max(1.0, evals.maxCoeff()) * static_cast<double>(evals.size()))) {
    throw_validation("global_min_oracle: inputs do not have full row rank (min eigenvalue of X X^T = " +
                     std::to_string(evals.minCoeff()) + ")");
  }
  const Matrix& v = sxx_eig.eigenvectors();
  const Matrix sqrt_s = v * evals.cwiseSqrt().asDiagonal() * v.transpose();
  const Matrix inv_sqrt_s = v * evals.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();

  // B = c A; unconstrained least squares B_ls = Y X^T (X X^T)^-1.
  const Matrix b_ls = sxx.ldlt().solve(x * y.transpose()).transpose();

  GlobalMinimum out;
  out.rank_bound = *std::min_element(spec.widths().begin(), spec.widths().end());
  out.least_squares_residual = 0.5 * (b_ls * x - y).squaredNorm();

  Eigen::JacobiSVD<Matrix> svd(b_ls * sqrt_s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const auto keep = static_cast<Eigen::Index>(
      std::min<std::size_t>(out.rank_bound, static_cast<std::size_t>(out.singular_values.size())));
  const Matrix b = svd.matrixU().leftCols(keep) * out.singular_values.head(keep).asDiagonal() *
                   svd.matrixV().leftCols(keep).transpose() * inv_sqrt_s;
  const Matrix a = b / c;

  // Balanced factorization A = U D^L V^T through the layer widths.
  Eigen::JacobiSVD<Matrix> a_svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto layers = static_cast<double>(spec.layer_count());
  const Vector root = a_svd.singularValues().head(keep).array().pow(1.0 / layers).matrix();
  const auto embed = [keep](std::size_t width) {
    Matrix e = Matrix::Zero(static_cast<Eigen::Index>(width), keep);
    e.topRows(keep).setIdentity();
    return e;
  };
  out.witness = zero_weights(spec);
  const std::size_t last = spec.layer_count() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const Matrix left = k == last ? Matrix(a_svd.matrixU().leftCols(keep)) : embed(spec.fan_out(k));
    const Matrix right = k == 0 ? Matrix(a_svd.matrixV().leftCols(keep)) : embed(spec.fan_in(k));
    out.witness.layers[k] = left * root.asDiagonal() * right.transpose();
  }
  out.min_loss = loss_unchecked(out.witness, data, c);
  return out;
}

DescentRun gradient_descent(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg,
                            WeightSet start, const DescentOptions& options) {
  require_variant(cfg, LossVariant::ExpectedOutput, "gradient_descent");
  validate_weights(spec, start);
  const double c = output_scale(spec, cfg);
  const double grad_tol = options.tol.grad_rel * (1.0 + 0.5 * data.targets().squaredNorm());

  DescentRun run;
  Vector theta = flatten(start);
  double loss = loss_unchecked(start, data, c);
  Vector g = flatten(gradient_unchecked(start, data, c));
  double step = 1.0;
  run.stop_reason = "iteration cap";

  for (run.iterations = 0; run.iterations < options.max_iterations; ++run.iterations) {
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) <= grad_tol) {
      run.converged = true;
      run.stop_reason = "gradient tolerance";
      break;
    }
    double t = step;
    Vector next;
    double next_loss = 0.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 200; ++backtrack, t *= 0.5) {
      next = theta - t * g;
      next_loss = loss_at(spec, next, data, c);
      if (next_loss <= loss - options.armijo * t * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      run.stop_reason = "line search failed";
      break;
    }
    const Vector next_g = flatten(gradient_unchecked(unflatten(spec, next), data, c));
    const Vector s = next - theta;
    const Vector yv = next_g - g;
    const double sy = s.dot(yv);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10) : std::min(2.0 * t, 1e10);
    theta = next;
    loss = next_loss;
    g = next_g;
    if (options.record_trace) run.loss_trace.push_back(loss);
  }
  run.theta = unflatten(spec, theta);
  run.grad_norm = g.norm();
  return run;
}

MultistartResult multistart_descent(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg,
                                    const InitScheme& scheme, std::size_t starts, std::uint64_t seed,
                                    const DescentOptions& options, double gap_tolerance) {
  require_variant(cfg, LossVariant::ExpectedOutput, "multistart_descent");
  MultistartResult result;
  result.gap_tolerance = gap_tolerance;
  result.oracle = global_min_oracle(spec, data, cfg);
  result.entries.resize(starts);

  parallel_chunks(starts, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t s = begin; s < end; ++s) {
      MultistartEntry& e = result.entries[s];
      e.start_id = s;
      e.run = gradient_descent(spec, data, cfg, sample_weights(spec, scheme, RngSeed{seed, s}), options);
      e.report = classify_point(spec, e.run.theta, data, cfg, options.tol);
    }
  });

  result.max_candidate_gap = -std::numeric_limits<double>::infinity();
  for (const MultistartEntry& e : result.entries) {
    if (e.report.classification != PointClass::LocalMinCandidate) continue;
    ++result.candidate_count;
    result.max_candidate_gap = std::max(result.max_candidate_gap, e.report.loss - result.oracle.min_loss);
  }
  if (result.candidate_count == 0) result.max_candidate_gap = 0.0;
  result.pass = result.max_candidate_gap <= gap_tolerance;
  return result;
}

ConvexityProbe convexity_probe(const NetworkSpec& spec, const Dataset& data, const LossConfig& cfg,
                               std::size_t probes, std::uint64_t seed, double point_scale, double eig_rel) {
  require_variant(cfg, LossVariant::ExpectedOutput, "convexity_probe");
  if (probes == 0) throw_validation("convexity_probe: need at least one probe");
  const auto n = static_cast<Eigen::Index>(spec.parameter_count());
  ConvexityProbe out;
  out.probes = probes;
  out.tolerance = eig_rel * curvature_unit(spec, data, cfg);
  out.min_curvature = std::numeric_limits<double>::infinity();
  out.max_curvature = -std::numeric_limits<double>::infinity();
  const CounterRng rng(RngSeed{seed, 0});
  for (std::size_t p = 0; p < probes; ++p) {
    const Vector point = point_scale * gaussian_vector(rng.substream(2 * p), n);
    const Vector dir = unit_gaussian(rng.substream(2 * p + 1), n);
    const double curv = directional_curvature(spec, unflatten(spec, point), data, cfg, dir);
    out.min_curvature = std::min(out.min_curvature, curv);
    out.max_curvature = std::max(out.max_curvature, curv);
  }
  out.found_positive_curvature = out.max_curvature > out.tolerance;
  out.found_negative_curvature = out.min_curvature < -out.tolerance;
  return out;
}

}  // namespace evenlab
