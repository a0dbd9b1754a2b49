#pragma once

#include "synclab/vector_field.hpp"

namespace synclab {

/// Real symmetric matrix with a cached eigendecomposition.
class SymMatrix {
 public:
  /// Throws NotSymmetric when max |M - M^T| exceeds 1e-12; otherwise stores the
  /// exactly symmetric part (M + M^T) / 2.
  explicit SymMatrix(const Matrix& m);

  [[nodiscard]] static SymMatrix diagonal(const StateVec& d);

  [[nodiscard]] Eigen::Index rows() const noexcept { return m_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
  [[nodiscard]] const StateVec& eigenvalues() const noexcept { return eigenvalues_; }
  [[nodiscard]] const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  [[nodiscard]] double max_eigenvalue() const { return eigenvalues_.maxCoeff(); }
  [[nodiscard]] bool is_diagonal() const noexcept { return diagonal_; }

 private:
  Matrix m_;
  StateVec eigenvalues_;
  Matrix eigenvectors_;
  bool diagonal_ = false;
};

/// e^{C t} = Q e^{Lambda t} Q^T. Diagonal C is handled entrywise, which is exact.
[[nodiscard]] Matrix sym_expm(const SymMatrix& c, double t);

}  // namespace synclab
