#include "synclab/sym_matrix.hpp"

#include "synclab/error.hpp"

#include <cmath>

namespace synclab {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "symmetric matrix must be square and non-empty");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12)) {
    throw Error(ErrorKind::NotSymmetric, "asymmetry " + std::to_string(asym) + " exceeds 1e-12");
  }
  m_ = 0.5 * (m + m.transpose());
  const Matrix off = m_ - Matrix(m_.diagonal().asDiagonal());
  diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
  if (diagonal_) {
    eigenvalues_ = m_.diagonal();
    eigenvectors_ = Matrix::Identity(m_.rows(), m_.cols());
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m_);
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
  }
}

SymMatrix SymMatrix::diagonal(const StateVec& d) { return SymMatrix(Matrix(d.asDiagonal())); }

Matrix sym_expm(const SymMatrix& c, double t) {
  const StateVec scaled = (c.eigenvalues() * t).unaryExpr([](double v) { return std::exp(v); });
  if (c.is_diagonal()) return Matrix(scaled.asDiagonal());
  const Matrix& q = c.eigenvectors();
  return q * scaled.asDiagonal() * q.transpose();
}

}  // namespace synclab
