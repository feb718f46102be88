#include "krein/metric.hpp"

#include <algorithm>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace krein {
namespace {

using Triplet = Eigen::Triplet<Complex>;

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

Index count_positive(const SparseMatrix& eta) {
  // eta is involutive, so its eigenvalues are +-1 and trace = n+ - n-.
  Complex trace = 0.0;
  for (Index k = 0; k < eta.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(eta, k); it; ++it)
      if (it.row() == it.col()) trace += it.value();
  const auto t = static_cast<Index>(std::llround(trace.real()));
  return (eta.rows() + t) / 2;
}

}  // namespace

IndefiniteMetric::IndefiniteMetric(SparseMatrix eta, Index n_positive)
    : eta_(std::move(eta)), n_positive_(n_positive) {
  eta_.makeCompressed();
}

IndefiniteMetric IndefiniteMetric::signature(Index n_positive, Index n_negative) {
  if (n_positive < 0 || n_negative < 0 || n_positive + n_negative == 0)
    throw std::invalid_argument("signature: counts must be non-negative with a positive sum");
  std::vector<int> signs(static_cast<size_t>(n_positive), 1);
  signs.resize(static_cast<size_t>(n_positive + n_negative), -1);
  return diagonal(signs);
}

IndefiniteMetric IndefiniteMetric::diagonal(const std::vector<int>& signs) {
  if (signs.empty()) throw std::invalid_argument("diagonal metric: empty signature");
  const auto n = static_cast<Index>(signs.size());
  SparseMatrix eta(n, n);
  std::vector<Triplet> t;
  Index n_positive = 0;
  for (Index i = 0; i < n; ++i) {
    const int s = signs[static_cast<size_t>(i)];
    if (s != 1 && s != -1) throw std::invalid_argument("diagonal metric: entries must be +1 or -1");
    n_positive += s > 0;
    t.emplace_back(i, i, Complex(s));
  }
  eta.setFromTriplets(t.begin(), t.end());
  return IndefiniteMetric(std::move(eta), n_positive);
}

IndefiniteMetric IndefiniteMetric::reflection(Index n) {
  if (n < 1) throw std::invalid_argument("reflection metric: dimension must be positive");
  SparseMatrix eta(n, n);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, n - 1 - i, Complex(1.0));
  eta.setFromTriplets(t.begin(), t.end());
  return IndefiniteMetric(std::move(eta), (n + 1) / 2);
}

IndefiniteMetric IndefiniteMetric::identity(Index n) { return signature(n, 0); }

IndefiniteMetric IndefiniteMetric::from_matrix(const SparseMatrix& eta, double tol) {
  if (eta.rows() != eta.cols() || eta.rows() == 0)
    throw std::invalid_argument("metric must be a non-empty square matrix");
  const SparseMatrix herm = SparseMatrix(eta.adjoint()) - eta;
  if (max_abs(herm) > tol) throw std::invalid_argument("metric is not Hermitian");
  SparseMatrix id(eta.rows(), eta.cols());
  id.setIdentity();
  const SparseMatrix square = SparseMatrix(eta * eta) - id;
  if (max_abs(square) > tol) throw std::invalid_argument("metric is not involutive (eta^2 != 1)");
  return IndefiniteMetric(eta, count_positive(eta));
}

IndefiniteMetric IndefiniteMetric::from_matrix(const Matrix& eta, double tol) {
  return from_matrix(SparseMatrix(eta.sparseView(0.0, 0.0)), tol);
}

IndefiniteMetric IndefiniteMetric::kron(const IndefiniteMetric& outer, const IndefiniteMetric& inner) {
  SparseMatrix eta = Eigen::kroneckerProduct(outer.matrix(), inner.matrix());
  const Index n_pos = outer.positive_count() * inner.positive_count() +
                      outer.negative_count() * inner.negative_count();
  return IndefiniteMetric(std::move(eta), n_pos);
}

}  // namespace krein
