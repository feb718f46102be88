#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace krein {

using Complex = std::complex<double>;
using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<Complex>;
using Vector = VectorX<Complex>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// A state is a plain coefficient vector; normalization is projective.
using StateVector = Vector;

/// Raised when a computation is well posed but fails numerically: an
/// eigensolver does not converge, a tolerance check is breached, a spectrum
/// cannot be classified consistently.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace krein
