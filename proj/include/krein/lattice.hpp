#pragma once

#include "krein/metric.hpp"

namespace krein {

/// Symmetric grid x_j = -x_max + j h with an odd point count, so x = 0 is a
/// grid point and x -> -x permutes the grid exactly.
class Grid1D {
 public:
  Grid1D(double x_max, Index n_points);

  double x_max() const { return x_max_; }
  Index size() const { return n_; }
  double spacing() const { return 2.0 * x_max_ / static_cast<double>(n_ - 1); }
  double x(Index j) const;
  Eigen::VectorXd points() const;

  /// n -> 2n - 1 points on a box scaled by `box_factor`.
  Grid1D refined(double box_factor = 1.5) const;

 private:
  double x_max_;
  Index n_;
};

enum class Representation { Schroedinger, DiracPauli };

enum class FirstDerivative {
  Central,  ///< (psi_{j+1} - psi_{j-1}) / 2h
  Sinc,     ///< band-limited derivative, D_jk = (-1)^{j-k} / ((j-k) h)
};

enum class Laplacian {
  ThreePoint,
  FivePoint,
};

struct StencilChoice {
  FirstDerivative first = FirstDerivative::Central;
  Laplacian second = Laplacian::FivePoint;
};

/// Real antisymmetric first-derivative matrix with Dirichlet boundaries.
SparseMatrix first_derivative(const Grid1D& grid, FirstDerivative stencil);
/// Real symmetric second-derivative matrix with Dirichlet boundaries.
SparseMatrix laplacian(const Grid1D& grid, Laplacian stencil);

struct LatticeOperators {
  SparseMatrix q;
  SparseMatrix p;
  /// Square of the momentum, built from the Laplacian stencil rather than p*p.
  SparseMatrix p_squared;
  IndefiniteMetric metric;
};

/// Schroedinger: q = diag(x), p = -i D, p^2 = -Lap, metric 1.
/// Dirac-Pauli:  q = diag(-i x), p = D, p^2 = Lap, metric = reflection.
/// All three operators are Krein-self-adjoint under the returned metric.
LatticeOperators build_operators(const Grid1D& grid, Representation rep, const StencilChoice& stencil = {});

/// Observable value -sum x^2 |psi|^2 / sum |psi|^2 of q^2 in the Dirac-Pauli
/// representation with the translation-free ghost choice.
double q_squared_expectation(const Vector& psi, const Grid1D& grid);

/// Fraction of sum |psi|^2 on points with |x| > fraction * x_max.
double boundary_mass(const Vector& psi, const Grid1D& grid, double fraction = 0.9);

/// Same for a wavefunction on grid2 (x) grid1 with index j2 * n1 + j1; a point
/// counts when either coordinate is near its boundary.
double boundary_mass(const Vector& psi, const Grid1D& grid1, const Grid1D& grid2, double fraction = 0.9);

}  // namespace krein
