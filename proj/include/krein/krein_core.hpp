#pragma once

#include <optional>
#include <vector>

#include "krein/metric.hpp"

namespace krein {

/// A square operator together with the metric it is adjoint-ed against.
class KreinOperator {
 public:
  KreinOperator(Matrix matrix, IndefiniteMetric metric);

  const Matrix& matrix() const { return matrix_; }
  const IndefiniteMetric& metric() const { return metric_; }
  Index dimension() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
  IndefiniteMetric metric_;
};

/// Sparse counterpart used for lattice Hamiltonians.
class SparseKreinOperator {
 public:
  SparseKreinOperator(SparseMatrix matrix, IndefiniteMetric metric);

  const SparseMatrix& matrix() const { return matrix_; }
  const IndefiniteMetric& metric() const { return metric_; }
  Index dimension() const { return matrix_.rows(); }

 private:
  SparseMatrix matrix_;
  IndefiniteMetric metric_;
};

/// eta A^H eta, the adjoint with respect to <.|.>_eta.
template <typename Derived>
Matrix krein_adjoint(const IndefiniteMetric& metric, const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols() || a.rows() != metric.dimension())
    throw std::invalid_argument("krein_adjoint: dimension mismatch");
  const SparseMatrix& eta = metric.matrix();
  const Matrix left = eta * Matrix(a.derived().template cast<Complex>().adjoint());
  return left * eta;
}

KreinOperator krein_adjoint(const KreinOperator& a);

/// max|A - A*| <= tol * max|A| (entrywise).
bool is_self_adjoint(const KreinOperator& a, double tol);
bool is_self_adjoint(const SparseKreinOperator& a, double tol);
/// Entrywise distance max|A - A*| / max|A|, zero for the zero matrix.
double self_adjoint_defect(const KreinOperator& a);
double self_adjoint_defect(const SparseKreinOperator& a);

enum class NormClass { Positive, Negative, Null };

struct SpectralEntry {
  Complex eigenvalue;
  StateVector vector;
  NormClass norm_class = NormClass::Positive;
  /// Index of the conjugate partner pair for null entries, -1 otherwise.
  int pair_id = -1;
  /// <v|v>_eta / |v|^2 before normalization.
  double relative_norm = 0.0;
};

/// Eigenpairs of a Krein-self-adjoint operator, tagged by norm sign.
///
/// Non-null vectors are scaled to <v|v>_eta = +-1, null vectors to unit
/// Euclidean length. Entries are ordered by real part (a null pair shares the
/// key of its smaller member), then imaginary part.
struct SpectralClassification {
  std::vector<SpectralEntry> entries;

  int null_pair_count() const;
  bool has_null_pairs() const { return null_pair_count() > 0; }
  std::vector<Complex> eigenvalues() const;
};

struct ClassifyOptions {
  double null_tol = 1e-8;
  /// Relative eigenvalue distance below which eigenvalues form one block.
  double degeneracy_tol = 1e-9;
  /// Relative mismatch |lambda_a - conj(lambda_b)| tolerated within a pair.
  double pair_tol = 1e-6;
  /// Relative entrywise defect tolerated by the self-adjointness check.
  double self_adjoint_tol = 1e-10;
};

/// Dense eigendecomposition with an unsymmetric complex solver followed by
/// norm classification. Throws std::invalid_argument when A is not
/// Krein-self-adjoint and NumericalFailure when null vectors do not pair up.
SpectralClassification classify_spectrum(const KreinOperator& a, const ClassifyOptions& options = {});

/// Classification of externally computed eigenpairs (columns of `vectors`).
SpectralClassification classify_eigenpairs(const Vector& values, const Matrix& vectors,
                                           const IndefiniteMetric& metric,
                                           const ClassifyOptions& options = {});

struct GhostResolution {
  enum class Kind { Unique, NoSolution, Family };

  Kind kind = Kind::NoSolution;
  /// The ghost operator (Unique) or one representative of the family.
  std::optional<KreinOperator> ghost;
  /// Family only: number of complex boost parameters (one real rapidity plus
  /// a phase each), the sum over degenerate blocks of n_plus * n_minus.
  int free_parameters = 0;
  SpectralClassification spectrum;
};

/// Solves [A, G] = 0 for an involutive G acting as the norm sign on an
/// eigenbasis of A.
GhostResolution ghost_resolution(const KreinOperator& a, const ClassifyOptions& options = {});

/// Ghost operator sum_i N_i |v_i><v_i| built from a null-free classification.
Matrix ghost_from_spectrum(const SpectralClassification& spectrum, const IndefiniteMetric& metric);

struct Outcome {
  Complex eigenvalue;
  double weight = 0.0;
};

/// p_i = |<A_i|psi>_A|^2 / <psi|psi>_A with the positive A-norm
/// <u|v>_A = <u|G_A v>_eta. Requires a unique ghost.
std::vector<Outcome> observable_probabilities(const KreinOperator& a, const StateVector& psi,
                                              const ClassifyOptions& options = {});

/// w_i = N_i |c_i|^2 / sum_j N_j |c_j|^2, the indefinite-norm averages of the
/// eigenprojectors. May be negative or exceed one.
std::vector<Outcome> indefinite_weights(const KreinOperator& a, const StateVector& psi,
                                        const ClassifyOptions& options = {});

/// U(1,1) boost diag(e^theta, e^{-conj(theta)}) on the null basis |0+>, |0->
/// of the two-dimensional reflection metric.
KreinOperator u11_boost(Complex theta);

/// Basis change from null coordinates to the orthogonal |+>, |-> basis,
/// |+-> = (|0+> +- |0->)/sqrt(2). Columns are |0+>, |0-> in +- coordinates.
Eigen::Matrix2cd null_to_pm_basis();

/// e^{-iHt} psi. Uses the eta-orthonormal eigenbasis when H has a real,
/// null-free spectrum, otherwise a scaled-and-squared matrix exponential.
StateVector evolve(const KreinOperator& h, double t, const StateVector& psi,
                   const ClassifyOptions& options = {});

/// e^{-iHt} as a matrix, same strategy as evolve().
Matrix evolution_operator(const KreinOperator& h, double t, const ClassifyOptions& options = {});

struct GhostCompatibility {
  bool commute = false;
  bool ghosts_equal = false;
  double commutator_norm = 0.0;
  double ghost_distance = 0.0;
  /// Conservation laws respected: commuting observables share their ghost.
  bool consistent() const { return !commute || ghosts_equal; }
};

GhostCompatibility ghost_compatibility(const KreinOperator& a, const KreinOperator& h, double tol,
                                       const ClassifyOptions& options = {});

}  // namespace krein
