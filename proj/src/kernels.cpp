#include "nirb/kernels.hpp"

#include <omp.h>

namespace nirb::kernels {

int thread_count() { return omp_get_max_threads(); }

Vector column_dots(const Matrix& columns, const Vector& w) {
  const Eigen::Index count = columns.cols();
  Vector out(count);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < count; ++j) out[j] = columns.col(j).dot(w);
  return out;
}

Vector column_energies(const Matrix& columns, const SpMat& gram) {
  const Eigen::Index count = columns.cols();
  Vector out(count);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < count; ++j) {
    const Vector gx = gram * columns.col(j);
    out[j] = columns.col(j).dot(gx);
  }
  return out;
}

Matrix project_fields(const std::vector<Vector>& fields, const Matrix& modes, const SpMat& gram) {
  const Matrix weighted = gram * modes;
  const auto count = static_cast<Eigen::Index>(fields.size());
  Matrix out(count, modes.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index n = 0; n < count; ++n) out.row(n) = (weighted.transpose() * fields[n]).transpose();
  return out;
}

std::vector<Vector> reconstruct_fields(const Matrix& coefficients, const Matrix& modes) {
  const Eigen::Index count = coefficients.rows();
  std::vector<Vector> out(count);
#pragma omp parallel for schedule(static)
  for (Eigen::Index n = 0; n < count; ++n) out[n] = modes * coefficients.row(n).transpose();
  return out;
}

void subtract_rank_one(Matrix& columns, const Vector& basis_vector, const Vector& coefficients) {
  const Eigen::Index count = columns.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < count; ++j) columns.col(j) -= coefficients[j] * basis_vector;
}

namespace serial {

Vector column_dots(const Matrix& columns, const Vector& w) {
  Vector out(columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) s += columns(i, j) * w[i];
    out[j] = s;
  }
  return out;
}

Vector column_energies(const Matrix& columns, const SpMat& gram) {
  Vector out(columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    double s = 0.0;
    for (int col = 0; col < gram.outerSize(); ++col) {
      for (SpMat::InnerIterator it(gram, col); it; ++it) s += columns(it.row(), j) * it.value() * columns(col, j);
    }
    out[j] = s;
  }
  return out;
}

Matrix project_fields(const std::vector<Vector>& fields, const Matrix& modes, const SpMat& gram) {
  Matrix out(static_cast<Eigen::Index>(fields.size()), modes.cols());
  for (size_t n = 0; n < fields.size(); ++n) {
    const Vector gf = gram * fields[n];
    for (Eigen::Index i = 0; i < modes.cols(); ++i) out(static_cast<Eigen::Index>(n), i) = modes.col(i).dot(gf);
  }
  return out;
}

std::vector<Vector> reconstruct_fields(const Matrix& coefficients, const Matrix& modes) {
  std::vector<Vector> out;
  out.reserve(coefficients.rows());
  for (Eigen::Index n = 0; n < coefficients.rows(); ++n) {
    Vector v = Vector::Zero(modes.rows());
    for (Eigen::Index i = 0; i < modes.cols(); ++i) v += coefficients(n, i) * modes.col(i);
    out.push_back(std::move(v));
  }
  return out;
}

void subtract_rank_one(Matrix& columns, const Vector& basis_vector, const Vector& coefficients) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    for (Eigen::Index i = 0; i < columns.rows(); ++i) columns(i, j) -= coefficients[j] * basis_vector[i];
  }
}

}  // namespace serial
}  // namespace nirb::kernels
