#pragma once

#include <vector>

#include "krein/types.hpp"

namespace krein {

/// Indefinite inner-product structure <u|v> = u^H eta v on a finite basis.
///
/// eta is Hermitian and involutive (eta * eta = 1). It is stored sparse so
/// that lattice metrics (reflections, tensor products of reflections) stay
/// cheap at dimension 10^4 and beyond.
class IndefiniteMetric {
 public:
  /// diag(+1 ... +1, -1 ... -1) with the given counts.
  static IndefiniteMetric signature(Index n_positive, Index n_negative);
  /// diag(signs); every entry must be +1 or -1.
  static IndefiniteMetric diagonal(const std::vector<int>& signs);
  /// Anti-diagonal ones: (eta psi)_j = psi_{n-1-j}, i.e. psi(x) -> psi(-x)
  /// on a symmetric grid.
  static IndefiniteMetric reflection(Index n);
  static IndefiniteMetric identity(Index n);
  /// Validates Hermiticity and eta^2 = 1 to `tol`.
  static IndefiniteMetric from_matrix(const SparseMatrix& eta, double tol = 1e-12);
  static IndefiniteMetric from_matrix(const Matrix& eta, double tol = 1e-12);
  /// Metric of the tensor product space, Kronecker order (outer, inner).
  static IndefiniteMetric kron(const IndefiniteMetric& outer, const IndefiniteMetric& inner);

  Index dimension() const { return eta_.rows(); }
  const SparseMatrix& matrix() const { return eta_; }
  Matrix dense() const { return Matrix(eta_); }

  /// Number of positive / negative eigenvalues of eta.
  Index positive_count() const { return n_positive_; }
  Index negative_count() const { return dimension() - n_positive_; }

  template <typename Derived>
  Matrix apply(const Eigen::MatrixBase<Derived>& v) const {
    return eta_ * v.derived().template cast<Complex>();
  }

 private:
  IndefiniteMetric(SparseMatrix eta, Index n_positive);

  SparseMatrix eta_;
  Index n_positive_ = 0;
};

/// <u|v>_eta = u^H eta v. Conjugate-symmetric in its arguments.
template <typename DerivedU, typename DerivedV>
Complex inner_product(const IndefiniteMetric& metric, const Eigen::MatrixBase<DerivedU>& bra,
                      const Eigen::MatrixBase<DerivedV>& ket) {
  if (bra.rows() != metric.dimension() || ket.rows() != metric.dimension() || bra.cols() != 1 ||
      ket.cols() != 1)
    throw std::invalid_argument("inner_product: dimension mismatch");
  return bra.derived().template cast<Complex>().dot(metric.apply(ket).col(0));
}

/// Real part of <v|v>_eta; the imaginary part vanishes identically.
template <typename Derived>
double indefinite_norm(const IndefiniteMetric& metric, const Eigen::MatrixBase<Derived>& v) {
  return inner_product(metric, v, v).real();
}

}  // namespace krein
