#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "krein/eigensolver.hpp"
#include "krein/oscillators.hpp"

using namespace krein;

namespace {

// Dirichlet second difference -u'' on n interior points with unit spacing.
SparseMatrix second_difference(Index n) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

TEST_CASE("dense eigenpairs are sorted by real then imaginary part") {
  Matrix a = Matrix::Zero(4, 4);
  a(0, 0) = 3.0;
  a(1, 1) = Complex(1.0, 2.0);
  a(2, 2) = Complex(1.0, -2.0);
  a(3, 3) = -1.0;
  const EigenPairs p = dense_eigenpairs(a);
  CHECK(p.values(0) == Complex(-1.0));
  CHECK(p.values(1) == Complex(1.0, -2.0));
  CHECK(p.values(2) == Complex(1.0, 2.0));
  CHECK(p.values(3) == Complex(3.0));
  CHECK_FALSE(p.iterative);
}

TEST_CASE("shift-invert finds the lowest second-difference eigenvalues") {
  const Index n = 3000;
  EigensolverOptions options;
  options.n_eigs = 6;
  options.shift = -1e-3;
  const EigenPairs p = lowest_eigenpairs(second_difference(n), options);
  CHECK(p.iterative);
  REQUIRE(p.values.size() == 6);
  for (Index k = 0; k < 6; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1));
    CHECK(std::abs(p.values(k) - exact) < 1e-9 * exact);
    CHECK(p.vectors.col(k).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("shift-invert agrees with the dense solver on a non-Hermitian lattice operator") {
  PaisUhlenbeckSpec spec;
  spec.grid1 = Grid1D(5.0, 21);
  spec.grid2 = Grid1D(5.0, 21);
  spec.g = 0.3;
  spec.lambda = 0.15;
  const SparseMatrix h = pu_hamiltonian(spec).matrix();
  const EigenPairs dense = dense_eigenpairs(Matrix(h));
  for (FillOrdering ordering : {FillOrdering::Natural, FillOrdering::Colamd}) {
    EigensolverOptions options;
    options.n_eigs = 8;
    options.shift = 0.25;
    options.ordering = ordering;
    const EigenPairs it = shift_invert_eigenpairs(h, options);
    REQUIRE(it.values.size() == 8);
    // The eight eigenvalues nearest the shift, compared as sets; a conjugate
    // pair may straddle the cut, so ties with the eighth are allowed.
    std::vector<Complex> near(dense.values.data(), dense.values.data() + dense.values.size());
    std::stable_sort(near.begin(), near.end(),
                     [&](Complex a, Complex b) { return std::abs(a - options.shift) < std::abs(b - options.shift); });
    const double cut = std::abs(near[7] - options.shift) + 1e-9;
    size_t candidates = 0;
    while (candidates < near.size() && std::abs(near[candidates] - options.shift) <= cut) ++candidates;
    for (Index k = 0; k < 8; ++k) {
      double best = INFINITY;
      for (size_t j = 0; j < candidates; ++j) best = std::min(best, std::abs(it.values(k) - near[j]));
      CHECK(best < 1e-8);
      CHECK((h * it.vectors.col(k) - it.values(k) * it.vectors.col(k)).norm() < 1e-7);
    }
  }
}

TEST_CASE("shift-invert argument checks") {
  EigensolverOptions options;
  options.n_eigs = 0;
  CHECK_THROWS_AS(shift_invert_eigenpairs(second_difference(100), options), std::invalid_argument);
  options.n_eigs = 3;
  CHECK_THROWS_AS(shift_invert_eigenpairs(SparseMatrix(3, 4), options), std::invalid_argument);
}

TEST_CASE("iteration limit is reported as a numerical failure") {
  EigensolverOptions options;
  options.n_eigs = 20;
  options.krylov_dim = 24;
  options.max_restarts = 0;
  options.tol = 1e-15;
  CHECK_THROWS_AS(shift_invert_eigenpairs(second_difference(5000), options), NumericalFailure);
}
