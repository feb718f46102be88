#include "krein/lattice.hpp"

#include <cmath>

namespace krein {
namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseMatrix diagonal(const Eigen::VectorXcd& d) {
  SparseMatrix out(d.size(), d.size());
  std::vector<Triplet> t;
  for (Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix banded(Index n, const std::vector<std::pair<Index, double>>& band) {
  SparseMatrix out(n, n);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
    for (const auto& [offset, value] : band) {
      const Index j = i + offset;
      if (j >= 0 && j < n) t.emplace_back(i, j, Complex(value));
    }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

Grid1D::Grid1D(double x_max, Index n_points) : x_max_(x_max), n_(n_points) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw std::invalid_argument("Grid1D: x_max must be positive");
  if (n_points < 3 || n_points % 2 == 0) throw std::invalid_argument("Grid1D: point count must be odd and >= 3");
}

double Grid1D::x(Index j) const {
  // Measured from the centre so that x(j) = -x(n-1-j) holds exactly.
  const Index mid = (n_ - 1) / 2;
  return static_cast<double>(j - mid) * spacing();
}

Eigen::VectorXd Grid1D::points() const {
  Eigen::VectorXd out(n_);
  for (Index j = 0; j < n_; ++j) out(j) = x(j);
  return out;
}

Grid1D Grid1D::refined(double box_factor) const { return Grid1D(x_max_ * box_factor, 2 * n_ - 1); }

SparseMatrix first_derivative(const Grid1D& grid, FirstDerivative stencil) {
  const Index n = grid.size();
  const double h = grid.spacing();
  if (stencil == FirstDerivative::Central) return banded(n, {{-1, -0.5 / h}, {1, 0.5 / h}});
  SparseMatrix out(n, n);
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(n * (n - 1)));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Index d = i - j;
      t.emplace_back(i, j, Complex((d % 2 == 0 ? 1.0 : -1.0) / (static_cast<double>(d) * h)));
    }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix laplacian(const Grid1D& grid, Laplacian stencil) {
  const double h2 = grid.spacing() * grid.spacing();
  if (stencil == Laplacian::ThreePoint) return banded(grid.size(), {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}});
  return banded(grid.size(), {{-2, -1.0 / (12.0 * h2)},
                              {-1, 16.0 / (12.0 * h2)},
                              {0, -30.0 / (12.0 * h2)},
                              {1, 16.0 / (12.0 * h2)},
                              {2, -1.0 / (12.0 * h2)}});
}

LatticeOperators build_operators(const Grid1D& grid, Representation rep, const StencilChoice& stencil) {
  const Eigen::VectorXd x = grid.points();
  const SparseMatrix d = first_derivative(grid, stencil.first);
  const SparseMatrix lap = laplacian(grid, stencil.second);
  if (rep == Representation::Schroedinger) {
    return {diagonal(x.cast<Complex>()), Complex(0.0, -1.0) * d, -lap, IndefiniteMetric::identity(grid.size())};
  }
  return {diagonal(Complex(0.0, -1.0) * x.cast<Complex>()), d, lap, IndefiniteMetric::reflection(grid.size())};
}

double q_squared_expectation(const Vector& psi, const Grid1D& grid) {
  if (psi.size() != grid.size()) throw std::invalid_argument("q_squared_expectation: size mismatch");
  double num = 0.0, den = 0.0;
  for (Index j = 0; j < grid.size(); ++j) {
    const double w = std::norm(psi(j));
    num += grid.x(j) * grid.x(j) * w;
    den += w;
  }
  if (den == 0.0) throw std::invalid_argument("q_squared_expectation: zero wavefunction");
  return -num / den;
}

double boundary_mass(const Vector& psi, const Grid1D& grid, double fraction) {
  if (psi.size() != grid.size()) throw std::invalid_argument("boundary_mass: size mismatch");
  double edge = 0.0, total = 0.0;
  for (Index j = 0; j < grid.size(); ++j) {
    const double w = std::norm(psi(j));
    total += w;
    if (std::abs(grid.x(j)) > fraction * grid.x_max()) edge += w;
  }
  return total > 0.0 ? edge / total : 0.0;
}

double boundary_mass(const Vector& psi, const Grid1D& grid1, const Grid1D& grid2, double fraction) {
  if (psi.size() != grid1.size() * grid2.size()) throw std::invalid_argument("boundary_mass: size mismatch");
  double edge = 0.0, total = 0.0;
  for (Index j2 = 0; j2 < grid2.size(); ++j2) {
    const bool edge2 = std::abs(grid2.x(j2)) > fraction * grid2.x_max();
    for (Index j1 = 0; j1 < grid1.size(); ++j1) {
      const double w = std::norm(psi(j2 * grid1.size() + j1));
      total += w;
      if (edge2 || std::abs(grid1.x(j1)) > fraction * grid1.x_max()) edge += w;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace krein
