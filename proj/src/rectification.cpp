#include "nirb/rectification.hpp"

#include <Eigen/Cholesky>

#include <string>

namespace nirb {

Vector RectificationSet::apply(int level, const Vector& coarse) const {
  if (level < 0 || level >= steps()) throw InvalidArgument("rectification: level out of range");
  if (coarse.size() != matrices[level].cols()) throw InvalidArgument("rectification: coefficient count mismatch");
  return matrices[level] * coarse;
}

Matrix RectificationSet::apply_all(const Matrix& coarse) const {
  if (coarse.rows() != steps()) throw InvalidArgument("rectification: level count mismatch");
  Matrix out(coarse.rows(), coarse.cols());
  for (int n = 0; n < steps(); ++n) out.row(n) = (matrices[n] * coarse.row(n).transpose()).transpose();
  return out;
}

RectificationSet build_rectification(const std::vector<Matrix>& coarse, const std::vector<Matrix>& fine, double delta) {
  if (coarse.size() != fine.size() || coarse.empty()) throw InvalidArgument("rectification: level counts differ");
  if (!(delta >= 0.0)) throw InvalidArgument("rectification: delta must be non-negative");
  RectificationSet set;
  set.delta = delta;
  set.matrices.resize(coarse.size());
  std::vector<char> failed(coarse.size(), 0);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < static_cast<int>(coarse.size()); ++n) {
    const Matrix& a = coarse[n];
    const Matrix& b = fine[n];
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      failed[n] = 1;
      continue;
    }
    if (a.cols() == 0) {  // empty basis
      set.matrices[n].resize(0, 0);
      continue;
    }
    Matrix normal = a.transpose() * a;
    normal.diagonal().array() += delta;
    Eigen::LDLT<Matrix> ldlt(normal);
    const Vector d = ldlt.vectorD();
    const double top = d.cwiseAbs().maxCoeff();
    const bool singular = delta == 0.0 ? d.minCoeff() <= 1e-13 * std::max(top, 1e-300) : d.minCoeff() <= 0.0;
    if (ldlt.info() != Eigen::Success || singular) {
      failed[n] = 1;
      continue;
    }
    set.matrices[n] = ldlt.solve(a.transpose() * b).transpose();
  }
  for (size_t n = 0; n < coarse.size(); ++n) {
    if (coarse[n].rows() != fine[n].rows() || coarse[n].cols() != fine[n].cols()) {
      throw InvalidArgument("rectification: coarse and fine coefficient shapes differ at level " + std::to_string(n));
    }
    if (failed[n]) {
      throw NumericalError("rectification: AᵀA + δI is singular at level " + std::to_string(n) +
                           "; the coarse coefficients are rank deficient, use a positive delta");
    }
  }
  return set;
}

std::vector<Matrix> per_level(const std::vector<Matrix>& tables) {
  if (tables.empty()) throw InvalidArgument("rectification: no coefficient tables");
  const Eigen::Index levels = tables.front().rows();
  const Eigen::Index modes = tables.front().cols();
  std::vector<Matrix> out(levels, Matrix(static_cast<Eigen::Index>(tables.size()), modes));
  for (size_t k = 0; k < tables.size(); ++k) {
    if (tables[k].rows() != levels || tables[k].cols() != modes) throw InvalidArgument("rectification: ragged tables");
    for (Eigen::Index n = 0; n < levels; ++n) out[n].row(static_cast<Eigen::Index>(k)) = tables[k].row(n);
  }
  return out;
}

}  // namespace nirb
