#pragma once

#include <cstdint>

#include "krein/types.hpp"

namespace krein {

/// Column ordering for the sparse LU of A - shift. Lattice operators in
/// grid order are already banded, where the natural order fills least.
enum class FillOrdering { Natural, Colamd };

struct EigensolverOptions {
  /// Number of eigenpairs wanted.
  Index n_eigs = 6;
  /// Shift for the iterative path; eigenvalues nearest to it are found first,
  /// so it should sit just below the part of the spectrum of interest.
  Complex shift = 0.0;
  /// Ritz residual |b y| <= tol |theta| of the shift-inverted operator.
  double tol = 1e-10;
  /// Krylov subspace size; 0 picks max(2 n_eigs + 20, 60).
  Index krylov_dim = 0;
  int max_restarts = 300;
  std::uint64_t seed = 0x6b7265696eULL;
  FillOrdering ordering = FillOrdering::Natural;
  /// Matrices up to this dimension are solved densely.
  Index dense_limit = 2000;
};

struct EigenPairs {
  /// Sorted by real part, then imaginary part.
  Vector values;
  /// Unit Euclidean norm columns.
  Matrix vectors;
  bool iterative = false;
  int restarts = 0;
  int operator_applications = 0;
};

/// All eigenpairs of a dense matrix, sorted by (Re, Im).
EigenPairs dense_eigenpairs(const Matrix& a);

/// The n_eigs eigenvalues nearest `shift` by thick-restart Arnoldi on
/// (A - shift)^{-1}, sorted by (Re, Im). Throws NumericalFailure when the
/// factorization fails or the iteration does not converge.
EigenPairs shift_invert_eigenpairs(const SparseMatrix& a, const EigensolverOptions& options);

/// Dense path below options.dense_limit (returns the n_eigs smallest by real
/// part), shift-invert otherwise.
EigenPairs lowest_eigenpairs(const SparseMatrix& a, const EigensolverOptions& options);

}  // namespace krein
