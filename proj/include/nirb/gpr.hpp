#pragma once

#include "nirb/types.hpp"

#include <Eigen/Cholesky>

#include <string>
#include <vector>

namespace nirb {

enum class KernelKind { squared_exponential, dot_product };

KernelKind parse_kernel_kind(const std::string& name);
std::string kernel_kind_name(KernelKind kind);

/// squared_exponential: σ_f² exp(-‖x-x'‖ / (2l²)), or with ‖x-x'‖² when
/// `squared_distance` is set. dot_product: 1 + x·x'.
struct Kernel {
  KernelKind kind = KernelKind::squared_exponential;
  double sigma_f = 1.0;
  double length_scale = 1.0;
  bool squared_distance = false;

  double operator()(const Vector& x, const Vector& y) const;
};

struct GprOptions {
  KernelKind kind = KernelKind::squared_exponential;
  bool squared_distance = false;
  double noise_variance = 1e-8;
  bool standardize_inputs = true;
  bool center_outputs = false;
  int starts = 5;
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
};

struct GprPrediction {
  Vector mean;
  double variance = 0.0;
};

/// Log marginal likelihood summed over the output columns of `outputs`,
/// including the -n/2 log 2π constant. Optionally returns the gradient with
/// respect to (log σ_f, log l) for the squared exponential kernel.
double log_marginal_likelihood(const Matrix& inputs, const Matrix& outputs, const Kernel& kernel,
                               double noise_variance, Vector* log_gradient = nullptr);

Matrix kernel_matrix(const Kernel& kernel, const Matrix& a, const Matrix& b);

/// Zero-mean GP with a kernel shared by all output columns. Inputs and
/// outputs hold one training pair per row.
class GprModel {
 public:
  /// Multi-start gradient ascent of the log marginal likelihood in log space.
  static GprModel fit(const Matrix& inputs, const Matrix& outputs, const GprOptions& options);
  /// No optimization: factorizes K_y for the given kernel.
  static GprModel condition(const Matrix& inputs, const Matrix& outputs, const Kernel& kernel,
                            const GprOptions& options);

  GprPrediction predict(const Vector& x) const;
  double log_marginal_likelihood() const;

  const Kernel& kernel() const { return kernel_; }
  double noise_variance() const { return noise_; }
  int training_size() const { return static_cast<int>(inputs_.rows()); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

  const Matrix& raw_inputs() const { return raw_inputs_; }
  const Matrix& raw_outputs() const { return raw_outputs_; }
  const GprOptions& options() const { return options_; }

 private:
  void prepare(const Matrix& inputs, const Matrix& outputs, const GprOptions& options);
  void factorize();
  Vector transform(const Vector& x) const;

  Kernel kernel_;
  double noise_ = 1e-8;
  GprOptions options_;
  Matrix raw_inputs_;
  Matrix raw_outputs_;
  Matrix inputs_;  // standardized
  Matrix outputs_;  // centered when requested
  Vector input_mean_;
  Vector input_scale_;
  Vector output_mean_;
  Eigen::LLT<Matrix> factor_;
  Matrix alpha_;
  bool converged_ = true;
  int iterations_ = 0;
  mutable std::vector<std::string> warnings_;
};

}  // namespace nirb
