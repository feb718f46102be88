#include "krein/oscillators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "spectrum_window.hpp"

namespace krein {

namespace detail {

SpectralClassification classify_window(const EigenPairs& pairs, const IndefiniteMetric& metric, Index n_levels,
                                       const ClassifyOptions& options) {
  Index count = pairs.values.size();
  if (count < n_levels) throw NumericalFailure("fewer eigenpairs than requested levels");
  SpectralClassification full;
  for (;;) {
    try {
      full = classify_eigenpairs(pairs.values.head(count), pairs.vectors.leftCols(count), metric, options);
      break;
    } catch (const NumericalFailure&) {
      if (count <= n_levels) throw;
      --count;
    }
  }
  SpectralClassification out;
  for (const auto& e : full.entries) {
    if (static_cast<Index>(out.entries.size()) >= n_levels) {
      const auto& last = out.entries.back();
      if (last.pair_id < 0 || e.pair_id != last.pair_id) break;
    }
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace detail

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> entry_boundary_mass(const SpectralClassification& s, const Grid1D& grid) {
  std::vector<double> out;
  for (const auto& e : s.entries) out.push_back(boundary_mass(e.vector, grid));
  return out;
}

LatticeSpectrum solve_ghost_oscillator(const Grid1D& grid, const PotentialSpec& potential, Index n_levels,
                                       const LatticeOptions& options) {
  const SparseKreinOperator h = ghost_oscillator_hamiltonian(grid, potential, options.stencil);
  EigensolverOptions solver;
  solver.n_eigs = std::min<Index>(n_levels + 8, grid.size());
  solver.shift = Complex(-1.0 + 0.5 * potential.k_lin * potential.k_lin, 0.0);
  solver.dense_limit = options.dense_limit;
  const EigenPairs pairs = lowest_eigenpairs(h.matrix(), solver);
  LatticeSpectrum out;
  out.spectrum = detail::classify_window(pairs, h.metric(), n_levels, options.classify);
  out.boundary_mass = entry_boundary_mass(out.spectrum, grid);
  out.iterative = pairs.iterative;
  return out;
}

}  // namespace

LadderTruncation ladder_truncation(Index levels) {
  if (levels < 2) throw std::invalid_argument("ladder_truncation: need at least two levels");
  const Index big = levels + 1;
  Matrix a = Matrix::Zero(big, big), ad = Matrix::Zero(big, big);
  for (Index k = 1; k < big; ++k) {
    a(k - 1, k) = -std::sqrt(static_cast<double>(k));
    ad(k, k - 1) = std::sqrt(static_cast<double>(k));
  }
  const Matrix h_big = -0.5 * (a * ad + ad * a);
  std::vector<int> signs;
  for (Index k = 0; k < levels; ++k) signs.push_back(k % 2 == 0 ? 1 : -1);

  LadderTruncation out{levels,
                       a.topLeftCorner(levels, levels),
                       ad.topLeftCorner(levels, levels),
                       h_big.topLeftCorner(levels, levels),
                       Matrix(),
                       Matrix(),
                       IndefiniteMetric::diagonal(signs)};
  const double r = 1.0 / std::sqrt(2.0);
  out.q = r * (out.a + out.a_dagger);
  out.p = (r / Complex(0.0, 1.0)) * (out.a - out.a_dagger);
  return out;
}

double commutator_defect(const LadderTruncation& trunc) {
  const Index inner = trunc.levels - 1;
  const Matrix comm = trunc.a * trunc.a_dagger - trunc.a_dagger * trunc.a;
  return max_abs(Matrix(comm.topLeftCorner(inner, inner) + Matrix::Identity(inner, inner)));
}

GhostFromEvolution ghost_from_evolution(const LadderTruncation& trunc) {
  const Matrix u = (Complex(0.0, -std::numbers::pi) * trunc.h).exp();
  const Matrix g = Complex(0.0, 1.0) * u;
  GhostFromEvolution out;
  out.residual = max_abs(Matrix(trunc.metric.dense() - g));
  out.anticommutator = max_abs(Matrix(g * trunc.q + trunc.q * g));
  return out;
}

SparseKreinOperator ghost_oscillator_hamiltonian(const Grid1D& grid, const PotentialSpec& potential,
                                                 const StencilChoice& stencil) {
  const LatticeOperators ops = build_operators(grid, Representation::DiracPauli, stencil);
  const Index n = grid.size();
  SparseMatrix potential_diag(n, n);
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index j = 0; j < n; ++j) {
    const Complex z(0.0, -grid.x(j));  // eigenvalue of q on |x>
    const Complex v = -0.5 * z * z + potential.k_lin * z + potential.quad_coeff * z * z +
                      potential.g * z * z * z + potential.lambda * z * z * z * z;
    t.emplace_back(j, j, v);
  }
  potential_diag.setFromTriplets(t.begin(), t.end());
  SparseMatrix h = potential_diag - 0.5 * ops.p_squared;
  SparseKreinOperator out(std::move(h), ops.metric);
  const double defect = self_adjoint_defect(out);
  if (defect > 1e-10)
    throw NumericalFailure("ghost oscillator Hamiltonian is not Krein-self-adjoint (defect " + std::to_string(defect) + ")");
  return out;
}

LatticeSpectrum ghost_oscillator_spectrum(const Grid1D& grid, const PotentialSpec& potential, Index n_levels,
                                          const LatticeOptions& options) {
  if (n_levels < 1) throw std::invalid_argument("ghost_oscillator_spectrum: n_levels must be positive");
  LatticeSpectrum out = solve_ghost_oscillator(grid, potential, n_levels, options);
  if (!options.check_convergence) return out;
  const LatticeSpectrum fine =
      solve_ghost_oscillator(grid.refined(options.refine_box_factor), potential, n_levels, options);
  const size_t common = std::min(out.spectrum.entries.size(), fine.spectrum.entries.size());
  for (size_t i = 0; i < common; ++i)
    out.convergence_shift = std::max(
        out.convergence_shift, std::abs(out.spectrum.entries[i].eigenvalue - fine.spectrum.entries[i].eigenvalue));
  if (out.convergence_shift > options.convergence_tol)
    throw NumericalFailure("ghost_oscillator_spectrum: eigenvalues moved by " + std::to_string(out.convergence_shift) +
                           " on the refined grid");
  return out;
}

ModeDecomposition mode_decomposition(double omega_plus, double omega_minus) {
  if (!(omega_plus > 0.0) || !(omega_minus > omega_plus))
    throw std::invalid_argument("mode_decomposition: need 0 < omega_plus < omega_minus");
  const double a = omega_plus * omega_plus, b = omega_minus * omega_minus;
  const double s = std::sqrt(b - a);
  ModeDecomposition out;
  out.from_modes << 1.0, 1.0, -a, -b;
  out.from_modes /= s;
  // Inverse of [[1, 1], [-a, -b]] / s.
  out.to_modes << -b, -1.0, a, 1.0;
  out.to_modes *= s / (a - b);
  out.phase_space.setZero();
  out.phase_space(0, 0) = out.phase_space(0, 2) = 1.0 / s;
  out.phase_space(1, 1) = out.phase_space(1, 3) = 1.0 / s;
  out.phase_space(2, 0) = -a / s;
  out.phase_space(2, 2) = -b / s;
  out.phase_space(3, 1) = -a / s;
  out.phase_space(3, 3) = -b / s;
  return out;
}

Eigen::Matrix4d ostrogradski_energy_form(double omega_plus, double omega_minus) {
  const double a = omega_plus * omega_plus, b = omega_minus * omega_minus;
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 0) = 0.5 * a * b;
  q(1, 1) = 0.5 * (a + b);
  q(2, 2) = -0.5;
  q(1, 3) = q(3, 1) = 0.5;
  return q;
}

double block_diagonalization_residual(double omega_plus, double omega_minus) {
  const ModeDecomposition m = mode_decomposition(omega_plus, omega_minus);
  const Eigen::Matrix4d e = m.phase_space.transpose() * ostrogradski_energy_form(omega_plus, omega_minus) * m.phase_space;
  Eigen::Vector4d expected(0.5 * omega_plus * omega_plus, 0.5, -0.5 * omega_minus * omega_minus, -0.5);
  return (e - Eigen::Matrix4d(expected.asDiagonal())).cwiseAbs().maxCoeff();
}

PropagatorCheck propagator_identity(double omega, double omega_plus, double omega_minus) {
  const double w2 = omega * omega, a = omega_plus * omega_plus, b = omega_minus * omega_minus;
  if (a == b) throw std::invalid_argument("propagator_identity: degenerate frequencies");
  if (w2 == a || w2 == b) throw std::invalid_argument("propagator_identity: omega sits on a pole");
  PropagatorCheck out;
  out.lhs = (1.0 / (w2 - a) - 1.0 / (w2 - b)) / (b - a);
  out.rhs = -1.0 / ((w2 - b) * (w2 - a));
  out.residual = std::abs(out.lhs - out.rhs);
  out.relative_residual = out.residual / std::max(std::abs(out.lhs), std::abs(out.rhs));
  return out;
}

ToyShift toy_second_order(double omega, double omega_plus, double omega_minus, double coupling) {
  const double e0 = omega * omega, ep = omega_plus * omega_plus, em = omega_minus * omega_minus;
  const double gap = std::min({std::abs(e0 - ep), std::abs(e0 - em), std::abs(ep - em)});
  if (gap == 0.0) throw std::invalid_argument("toy_second_order: degenerate free energies");
  if (std::abs(coupling) > 0.1 * gap)
    throw std::invalid_argument("toy_second_order: coupling exceeds a tenth of the smallest gap");

  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = e0;
  h(1, 1) = ep;
  h(2, 2) = em;
  // <j|V|+> = c, <j|V|-> = -c in matrix entries, so that V is self-adjoint
  // under diag(1, 1, -1) while |j> couples to |+> + |->.
  h(0, 1) = coupling;
  h(1, 0) = coupling;
  h(0, 2) = -coupling;
  h(2, 0) = coupling;
  const KreinOperator op(h, IndefiniteMetric::diagonal({1, 1, -1}));
  if (self_adjoint_defect(op) > 1e-14) throw NumericalFailure("toy_second_order: coupling breaks self-adjointness");

  Eigen::ComplexEigenSolver<Matrix> es(h, false);
  Index nearest = 0;
  (es.eigenvalues().array() - e0).abs().minCoeff(&nearest);
  ToyShift out;
  // Second order: sum_n V_jn V_nj / (E_j - E_n); the |-> term carries the
  // opposite sign through V_j- V_-j = -c^2.
  out.perturbative = coupling * coupling * (1.0 / (e0 - ep) - 1.0 / (e0 - em));
  out.exact = es.eigenvalues()(nearest).real() - e0;
  out.residual = std::abs(out.exact - out.perturbative);
  return out;
}

}  // namespace krein
