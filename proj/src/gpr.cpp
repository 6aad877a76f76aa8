#include "nirb/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nirb {

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "squared_exponential" || name == "se") return KernelKind::squared_exponential;
  if (name == "dot_product" || name == "dot") return KernelKind::dot_product;
  throw ConfigError("unknown kernel kind '" + name + "'");
}

std::string kernel_kind_name(KernelKind kind) {
  return kind == KernelKind::squared_exponential ? "squared_exponential" : "dot_product";
}

double Kernel::operator()(const Vector& x, const Vector& y) const {
  if (x.size() != y.size()) throw InvalidArgument("kernel: dimension mismatch");
  if (kind == KernelKind::dot_product) return 1.0 + x.dot(y);
  const double d2 = (x - y).squaredNorm();
  const double d = squared_distance ? d2 : std::sqrt(d2);
  return sigma_f * sigma_f * std::exp(-d / (2.0 * length_scale * length_scale));
}

Matrix kernel_matrix(const Kernel& kernel, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw InvalidArgument("kernel: dimension mismatch");
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose());
  }
  return k;
}

namespace {

// Pairwise distances as they enter the exponent (‖·‖ or ‖·‖²).
Matrix exponent_distances(const Matrix& x, bool squared) {
  Matrix d(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double d2 = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = squared ? d2 : std::sqrt(d2);
    }
  }
  return d;
}

}  // namespace

double log_marginal_likelihood(const Matrix& inputs, const Matrix& outputs, const Kernel& kernel,
                               double noise_variance, Vector* log_gradient) {
  const Eigen::Index n = inputs.rows();
  if (outputs.rows() != n) throw InvalidArgument("lml: input and output counts differ");
  Matrix k = kernel_matrix(kernel, inputs, inputs);
  Matrix ky = k;
  ky.diagonal().array() += noise_variance;
  Eigen::LLT<Matrix> llt(ky);
  if (llt.info() != Eigen::Success) throw NumericalError("lml: K_y is not positive definite");
  const Matrix alpha = llt.solve(outputs);
  const double m = static_cast<double>(outputs.cols());
  double log_det = 0.0;
  const Matrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
  const double quad = (outputs.array() * alpha.array()).sum();
  const double value = -0.5 * quad - 0.5 * m * log_det - 0.5 * m * n * std::log(2.0 * std::numbers::pi);
  if (log_gradient) {
    log_gradient->setZero(2);
    if (kernel.kind == KernelKind::squared_exponential) {
      const Matrix inner = alpha * alpha.transpose() - m * llt.solve(Matrix::Identity(n, n));
      const Matrix d = exponent_distances(inputs, kernel.squared_distance);
      const Matrix dk_sigma = 2.0 * k;
      const Matrix dk_length = k.cwiseProduct(d) / (kernel.length_scale * kernel.length_scale);
      (*log_gradient)[0] = 0.5 * inner.cwiseProduct(dk_sigma).sum();
      (*log_gradient)[1] = 0.5 * inner.cwiseProduct(dk_length).sum();
    }
  }
  return value;
}

void GprModel::prepare(const Matrix& inputs, const Matrix& outputs, const GprOptions& options) {
  if (inputs.rows() != outputs.rows()) throw InvalidArgument("gpr: input and output counts differ");
  if (inputs.rows() < 1) throw InvalidArgument("gpr: no training data");
  if (!(options.noise_variance > 0.0)) throw InvalidArgument("gpr: noise variance must be positive");
  options_ = options;
  noise_ = options.noise_variance;
  raw_inputs_ = inputs;
  raw_outputs_ = outputs;
  input_mean_ = Vector::Zero(inputs.cols());
  input_scale_ = Vector::Ones(inputs.cols());
  if (options.standardize_inputs && inputs.rows() > 1) {
    input_mean_ = inputs.colwise().mean().transpose();
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
      const double var = (inputs.col(j).array() - input_mean_[j]).square().sum() / static_cast<double>(inputs.rows());
      input_scale_[j] = var > 1e-300 ? std::sqrt(var) : 1.0;
    }
  }
  inputs_.resize(inputs.rows(), inputs.cols());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) inputs_.row(i) = transform(inputs.row(i).transpose()).transpose();
  output_mean_ = Vector::Zero(outputs.cols());
  if (options.center_outputs) output_mean_ = outputs.colwise().mean().transpose();
  outputs_ = outputs.rowwise() - output_mean_.transpose();
}

Vector GprModel::transform(const Vector& x) const {
  if (x.size() != input_mean_.size()) throw InvalidArgument("gpr: input dimension mismatch");
  return (x - input_mean_).cwiseQuotient(input_scale_);
}

void GprModel::factorize() {
  Matrix ky = kernel_matrix(kernel_, inputs_, inputs_);
  ky.diagonal().array() += noise_;
  factor_.compute(ky);
  if (factor_.info() != Eigen::Success) throw NumericalError("gpr: K_y is not positive definite");
  alpha_ = factor_.solve(outputs_);
}

GprModel GprModel::condition(const Matrix& inputs, const Matrix& outputs, const Kernel& kernel,
                             const GprOptions& options) {
  GprModel model;
  model.prepare(inputs, outputs, options);
  model.kernel_ = kernel;
  model.factorize();
  return model;
}

GprModel GprModel::fit(const Matrix& inputs, const Matrix& outputs, const GprOptions& options) {
  GprModel model;
  model.prepare(inputs, outputs, options);
  model.kernel_.kind = options.kind;
  model.kernel_.squared_distance = options.squared_distance;
  if (options.kind == KernelKind::dot_product) {
    model.factorize();
    return model;
  }
  if (inputs.rows() < 2) throw InvalidArgument("gpr: fitting needs at least two training pairs");

  // Starting points: signal scale from the outputs, length scales on a log
  // grid around the median pairwise distance.
  const Matrix d = exponent_distances(model.inputs_, options.squared_distance);
  std::vector<double> off;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (d(i, j) > 0.0) off.push_back(d(i, j));
    }
  }
  double median = 1.0;
  if (!off.empty()) {
    std::nth_element(off.begin(), off.begin() + off.size() / 2, off.end());
    median = off[off.size() / 2];
  }
  const double length_ref = std::sqrt(0.5 * median);
  const double signal = std::sqrt(std::max(model.outputs_.array().square().mean(), 1e-300));

  auto evaluate = [&](const Vector& theta, Vector* grad) {
    Kernel k = model.kernel_;
    k.sigma_f = std::exp(theta[0]);
    k.length_scale = std::exp(theta[1]);
    try {
      return nirb::log_marginal_likelihood(model.inputs_, model.outputs_, k, model.noise_, grad);
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  double best_value = -std::numeric_limits<double>::infinity();
  Vector best_theta(2);
  best_theta << std::log(signal), std::log(length_ref);
  bool any_converged = false;
  int total_iterations = 0;
  const int starts = std::max(1, options.starts);
  for (int s = 0; s < starts; ++s) {
    const double offset = starts == 1 ? 0.0 : -2.0 + 4.0 * s / (starts - 1);
    Vector theta(2);
    theta << std::log(signal), std::log(length_ref) + offset * std::log(2.0);
    Vector grad(2);
    double value = evaluate(theta, &grad);
    if (!std::isfinite(value)) continue;
    double step = 1.0;
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      ++total_iterations;
      if (grad.norm() < options.gradient_tolerance) {
        converged = true;
        break;
      }
      // Backtracking (Armijo) ascent step in log space.
      bool accepted = false;
      while (step > 1e-14) {
        Vector trial = theta + step * grad;
        trial = trial.cwiseMax(-30.0).cwiseMin(30.0);
        Vector trial_grad(2);
        const double trial_value = evaluate(trial, &trial_grad);
        if (std::isfinite(trial_value) && trial_value >= value + 1e-4 * step * grad.squaredNorm()) {
          theta = trial;
          value = trial_value;
          grad = trial_grad;
          step = std::min(step * 2.0, 1e6);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // No ascent direction left at working precision: a stationary point.
        converged = true;
        break;
      }
    }
    any_converged = any_converged || converged;
    if (value > best_value) {
      best_value = value;
      best_theta = theta;
    }
  }
  model.iterations_ = total_iterations;
  model.converged_ = any_converged;
  if (!any_converged) model.warnings_.push_back("gpr: no start reached the gradient tolerance; using the best point");
  if (!std::isfinite(best_value)) model.warnings_.push_back("gpr: every start failed; falling back to initial guess");
  model.kernel_.sigma_f = std::exp(best_theta[0]);
  model.kernel_.length_scale = std::exp(best_theta[1]);
  model.factorize();
  return model;
}

GprPrediction GprModel::predict(const Vector& x) const {
  const Vector z = transform(x);
  Vector k_star(inputs_.rows());
  for (Eigen::Index i = 0; i < inputs_.rows(); ++i) k_star[i] = kernel_(inputs_.row(i).transpose(), z);
  GprPrediction p;
  p.mean = alpha_.transpose() * k_star + output_mean_;
  const Vector v = factor_.matrixL().solve(k_star);
  double var = kernel_(z, z) - v.squaredNorm();
  if (var < 0.0) {
    if (var < -1e-8) warnings_.push_back("gpr: negative predictive variance clamped to zero");
    var = 0.0;
  }
  p.variance = var;
  return p;
}

double GprModel::log_marginal_likelihood() const {
  return nirb::log_marginal_likelihood(inputs_, outputs_, kernel_, noise_);
}

}  // namespace nirb
