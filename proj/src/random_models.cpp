#include "krein/random_models.hpp"

#include <algorithm>

#include <unsupported/Eigen/MatrixFunctions>

namespace krein {

IndefiniteMetric random_signature(Index dim, bool indefinite, std::mt19937_64& rng) {
  if (dim < 1) throw std::invalid_argument("random_signature: dimension must be positive");
  std::vector<int> signs(static_cast<size_t>(dim), 1);
  if (indefinite && dim >= 2) {
    std::uniform_int_distribution<Index> negatives(1, dim - 1);
    const Index n_neg = negatives(rng);
    for (Index i = 0; i < n_neg; ++i) signs[static_cast<size_t>(i)] = -1;
    std::shuffle(signs.begin(), signs.end(), rng);
  }
  return IndefiniteMetric::diagonal(signs);
}

Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = u(rng);
      m(i, j) = Complex(re, u(rng));
    }
  return m;
}

Matrix random_pseudo_unitary(const IndefiniteMetric& metric, double scale, std::mt19937_64& rng) {
  const Index n = metric.dimension();
  const Matrix x = random_complex(n, n, rng);
  const Matrix herm = 0.5 * (x + x.adjoint());
  const double norm = herm.operatorNorm();
  const Matrix k = metric.dense() * herm * (norm > 0.0 ? scale / norm : 0.0);
  return (Complex(0.0, 1.0) * k).exp();
}

KreinOperator random_real_spectrum_operator(const IndefiniteMetric& metric, const Eigen::VectorXd& values,
                                            double scale, std::mt19937_64& rng) {
  if (values.size() != metric.dimension()) throw std::invalid_argument("random_real_spectrum_operator: size mismatch");
  const Matrix b = random_pseudo_unitary(metric, scale, rng);
  const Matrix eta = metric.dense();
  const Matrix b_inv = eta * b.adjoint() * eta;
  Matrix a = b * values.cast<Complex>().asDiagonal() * b_inv;
  // Remove the rounding-level Krein-antiself-adjoint part.
  a = (0.5 * (a + krein_adjoint(metric, a))).eval();
  return KreinOperator(std::move(a), metric);
}

Eigen::VectorXd random_distinct_values(Index n, double lo, double hi, double gap, std::mt19937_64& rng) {
  if (!(hi - lo > gap * static_cast<double>(n))) throw std::invalid_argument("random_distinct_values: range too small");
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out;
  while (static_cast<Index>(out.size()) < n) {
    const double v = u(rng);
    if (std::all_of(out.begin(), out.end(), [&](double w) { return std::abs(w - v) >= gap; })) out.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(), n);
}

}  // namespace krein
