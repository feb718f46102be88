#include "krein/eigensolver.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/SparseLU>

namespace krein {
namespace {

std::vector<Index> order_by_real(const Vector& values) {
  std::vector<Index> order(static_cast<size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });
  return order;
}

EigenPairs select(const Vector& values, const Matrix& vectors, const std::vector<Index>& order, Index count) {
  EigenPairs out;
  out.values.resize(count);
  out.vectors.resize(vectors.rows(), count);
  for (Index j = 0; j < count; ++j) {
    out.values(j) = values(order[static_cast<size_t>(j)]);
    out.vectors.col(j) = vectors.col(order[static_cast<size_t>(j)]).normalized();
  }
  return out;
}

Vector random_unit(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = u(rng);
    v(i) = Complex(re, u(rng));
  }
  return v.normalized();
}

// Classical Gram-Schmidt with one reorthogonalization pass.
Vector orthogonalize(const Matrix& basis, Index count, Vector& w) {
  const auto q = basis.leftCols(count);
  Vector h = q.adjoint() * w;
  w -= q * h;
  const Vector h2 = q.adjoint() * w;
  w -= q * h2;
  return h + h2;
}

template <typename Lu>
EigenPairs arnoldi(const SparseMatrix& shifted, const EigensolverOptions& options, Index nev, Index m);

}  // namespace

EigenPairs dense_eigenpairs(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("dense_eigenpairs: matrix is not square");
  Eigen::ComplexEigenSolver<Matrix> es(a, true);
  if (es.info() != Eigen::Success) throw NumericalFailure("dense eigensolver did not converge");
  return select(es.eigenvalues(), es.eigenvectors(), order_by_real(es.eigenvalues()), a.rows());
}

EigenPairs shift_invert_eigenpairs(const SparseMatrix& a, const EigensolverOptions& options) {
  const Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("shift_invert_eigenpairs: matrix is not square");
  const Index nev = options.n_eigs;
  if (nev < 1) throw std::invalid_argument("shift_invert_eigenpairs: n_eigs must be positive");
  Index m = options.krylov_dim > 0 ? options.krylov_dim : std::max<Index>(2 * nev + 20, 60);
  m = std::min(m, n - 1);
  if (nev + 2 > m) throw std::invalid_argument("shift_invert_eigenpairs: Krylov space too small for n_eigs");

  SparseMatrix shifted = a;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= options.shift;
  shifted.makeCompressed();
  return options.ordering == FillOrdering::Natural
             ? arnoldi<Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>>>(shifted, options, nev, m)
             : arnoldi<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>(shifted, options, nev, m);
}

namespace {

template <typename Lu>
EigenPairs arnoldi(const SparseMatrix& shifted, const EigensolverOptions& options, Index nev, Index m) {
  const Index n = shifted.rows();
  Lu lu;
  lu.analyzePattern(shifted);
  lu.factorize(shifted);
  if (lu.info() != Eigen::Success)
    throw NumericalFailure("shift_invert_eigenpairs: factorization failed (" + lu.lastErrorMessage() + ")");

  std::mt19937_64 rng(options.seed);
  Matrix v(n, m + 1);
  Matrix h = Matrix::Zero(m + 1, m);
  v.col(0) = random_unit(n, rng);
  Index start = 0;
  EigenPairs out;
  out.iterative = true;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    for (Index j = start; j < m; ++j) {
      Vector w = lu.solve(v.col(j));
      ++out.operator_applications;
      const Vector coeffs = orthogonalize(v, j + 1, w);
      h.block(0, j, j + 1, 1) = coeffs;
      double beta = w.norm();
      if (beta <= 1e-14 * coeffs.norm()) {
        // Invariant subspace found; continue with a fresh direction.
        w = random_unit(n, rng);
        orthogonalize(v, j + 1, w);
        v.col(j + 1) = w.normalized();
        h(j + 1, j) = 0.0;
        continue;
      }
      h(j + 1, j) = beta;
      v.col(j + 1) = w / beta;
    }

    const Matrix hm = h.topLeftCorner(m, m);
    const Eigen::RowVectorXcd b = h.row(m);
    Eigen::ComplexEigenSolver<Matrix> es(hm, true);
    if (es.info() != Eigen::Success) throw NumericalFailure("shift_invert_eigenpairs: projected eigensolve failed");
    const Vector theta = es.eigenvalues();
    std::vector<Index> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return std::abs(theta(x)) > std::abs(theta(y)); });

    bool converged = true;
    for (Index j = 0; j < nev && converged; ++j) {
      const Index idx = order[static_cast<size_t>(j)];
      const Vector y = es.eigenvectors().col(idx).normalized();
      converged = std::abs(Complex(b * y)) <= options.tol * std::abs(theta(idx));
    }
    if (converged) {
      Vector values(nev);
      Matrix vectors(n, nev);
      for (Index j = 0; j < nev; ++j) {
        const Index idx = order[static_cast<size_t>(j)];
        values(j) = options.shift + 1.0 / theta(idx);
        vectors.col(j) = v.leftCols(m) * es.eigenvectors().col(idx);
      }
      EigenPairs sorted = select(values, vectors, order_by_real(values), nev);
      sorted.iterative = true;
      sorted.restarts = restart;
      sorted.operator_applications = out.operator_applications;
      return sorted;
    }

    // Thick restart on an orthonormal basis of the wanted Ritz vectors.
    const Index keep = std::min<Index>(nev + (m - nev) / 2, m - 1);
    Matrix y(m, keep);
    for (Index j = 0; j < keep; ++j) y.col(j) = es.eigenvectors().col(order[static_cast<size_t>(j)]);
    const Eigen::HouseholderQR<Matrix> qr(y);
    const Matrix q = qr.householderQ() * Matrix::Identity(m, keep);
    const Matrix h_new = q.adjoint() * hm * q;
    const Eigen::RowVectorXcd b_new = b * q;
    const Matrix v_new = v.leftCols(m) * q;
    v.leftCols(keep) = v_new;
    v.col(keep) = v.col(m);
    h.setZero();
    h.topLeftCorner(keep, keep) = h_new;
    h.block(keep, 0, 1, keep) = b_new;
    start = keep;
  }
  throw NumericalFailure("shift_invert_eigenpairs: no convergence after " + std::to_string(options.max_restarts) +
                         " restarts");
}

}  // namespace

EigenPairs lowest_eigenpairs(const SparseMatrix& a, const EigensolverOptions& options) {
  if (a.rows() <= options.dense_limit) {
    EigenPairs all = dense_eigenpairs(Matrix(a));
    const Index count = std::min(options.n_eigs, all.values.size());
    all.values.conservativeResize(count);
    all.vectors.conservativeResize(Eigen::NoChange, count);
    return all;
  }
  return shift_invert_eigenpairs(a, options);
}

}  // namespace krein
