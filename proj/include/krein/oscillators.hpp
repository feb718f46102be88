#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krein/eigensolver.hpp"
#include "krein/krein_core.hpp"
#include "krein/lattice.hpp"

namespace krein {

// ---------------------------------------------------------------------------
// Ladder algebra with [a, a^dagger] = -1.

struct LadderTruncation {
  Index levels = 0;
  Matrix a;
  Matrix a_dagger;
  /// -1/2 (a a^dagger + a^dagger a) = diag(k + 1/2); built one level larger
  /// and cut, so no boundary artefact survives.
  Matrix h;
  Matrix q;  ///< (a + a^dagger) / sqrt(2)
  Matrix p;  ///< (a - a^dagger) / (i sqrt(2))
  IndefiniteMetric metric;  ///< diag((-1)^k)
};

LadderTruncation ladder_truncation(Index levels);

/// max |[a, a^dagger] + 1| on the block that excludes the last level.
double commutator_defect(const LadderTruncation& trunc);

struct GhostFromEvolution {
  /// max |diag((-1)^k) - i exp(-i pi H)|
  double residual = 0.0;
  /// max |{G_H, q}| with G_H = i exp(-i pi H)
  double anticommutator = 0.0;
};

GhostFromEvolution ghost_from_evolution(const LadderTruncation& trunc);

// ---------------------------------------------------------------------------
// Lattice spectra.

/// V(q) = k q + quad q^2 + g q^3 + lambda q^4, added to H = -1/2 (q^2 + p^2).
/// quad = -1/2 reproduces the potential as written next to the ghost
/// oscillator; the default 0 adds the interaction to the free Hamiltonian.
struct PotentialSpec {
  double k_lin = 0.0;
  double quad_coeff = 0.0;
  double g = 0.0;
  double lambda = 0.0;
};

struct LatticeOptions {
  StencilChoice stencil{};
  ClassifyOptions classify{};
  /// Rerun on Grid1D::refined() and require every reported eigenvalue to move
  /// by less than convergence_tol.
  bool check_convergence = true;
  double convergence_tol = 2e-2;
  double refine_box_factor = 1.5;
  /// Grids above this size use the shift-invert solver.
  Index dense_limit = 256;
};

struct LatticeSpectrum {
  SpectralClassification spectrum;
  /// Per entry, fraction of |psi|^2 within 10% of the box edge.
  std::vector<double> boundary_mass;
  /// Largest eigenvalue shift on the refined grid (0 when not checked).
  double convergence_shift = 0.0;
  bool iterative = false;
};

/// Ghost-oscillator Hamiltonian -1/2 (q^2 + p^2) + V(q) in the Dirac-Pauli
/// representation on `grid`.
SparseKreinOperator ghost_oscillator_hamiltonian(const Grid1D& grid, const PotentialSpec& potential,
                                                 const StencilChoice& stencil = {});

/// Lowest n_levels eigenpairs by real part, classified. Throws
/// NumericalFailure when the refined grid disagrees beyond convergence_tol.
LatticeSpectrum ghost_oscillator_spectrum(const Grid1D& grid, const PotentialSpec& potential, Index n_levels,
                                          const LatticeOptions& options = {});

// ---------------------------------------------------------------------------
// Four-derivative (Pais-Uhlenbeck) oscillator in Ostrogradski variables
// q1 = q (Schroedinger representation) and q2 = dq/dt (Dirac-Pauli).

struct PaisUhlenbeckSpec {
  double omega_plus = 1.0;
  double omega_minus = 1.5;
  double g = 0.0;
  double lambda = 0.0;
  Grid1D grid1{6.0, 101};
  Grid1D grid2{6.0, 101};
};

/// Ostrogradski Hamiltonian on the tensor grid,
///   -x2 d/dx1 + 1/2 w+^2 w-^2 x1^2 + 1/2 (w+^2 + w-^2) x2^2 - 1/2 d^2/dx2^2
///   + g x1^3 + lambda x1^4,
/// index j2 * n1 + j1, metric 1 (x) reflection. The free spectrum is
/// w+ (n+ + 1/2) + w- (n- + 1/2) with norms (-1)^{n-}.
SparseKreinOperator pu_hamiltonian(const PaisUhlenbeckSpec& spec, FirstDerivative q1_derivative = FirstDerivative::Sinc,
                                   Laplacian q2_laplacian = Laplacian::FivePoint);

struct PuSolveOptions {
  EigensolverOptions solver{};
  ClassifyOptions classify{};
  /// Eigenpairs requested beyond n_levels, so that conjugate pairs at the edge
  /// of the window are complete.
  Index extra_levels = 8;
  /// Shift below the free ground state used by the iterative solver.
  double shift_below_ground = 1.0;
  /// Sinc derivative in q1 (the central difference doubles the spectrum).
  FirstDerivative q1_derivative = FirstDerivative::Sinc;
  Laplacian q2_laplacian = Laplacian::FivePoint;
};

/// Lowest n_levels by real part; a null pair cut by the window is kept whole.
LatticeSpectrum pu_spectrum(const PaisUhlenbeckSpec& spec, Index n_levels, const PuSolveOptions& options = {});

struct ScanPoint {
  double g = 0.0;
  std::optional<LatticeSpectrum> result;
  /// Failure message when result is empty.
  std::string error;
};

/// One independent solve per coupling with lambda = lambda_over_g * g; runs up
/// to `jobs` solves concurrently and returns points in input order.
std::vector<ScanPoint> pu_spectrum_scan(const PaisUhlenbeckSpec& spec, const std::vector<double>& g_values,
                                        Index n_levels, double lambda_over_g = 0.5, int jobs = 1,
                                        const PuSolveOptions& options = {});

/// Same scan for the ghost oscillator; `potential.g` is overwritten per point.
std::vector<ScanPoint> ghost_oscillator_scan(const Grid1D& grid, const PotentialSpec& potential,
                                             const std::vector<double>& g_values, Index n_levels, int jobs = 1,
                                             const LatticeOptions& options = {});

// ---------------------------------------------------------------------------
// Classical mode decomposition and the propagator identity.

struct ModeDecomposition {
  /// (q, q'') = from_modes * (q+, q-)
  Eigen::Matrix2d from_modes;
  Eigen::Matrix2d to_modes;
  /// Phase-space map (q+, q+', q-, q-') -> (q, q', q'', q''').
  Eigen::Matrix4d phase_space;
};

ModeDecomposition mode_decomposition(double omega_plus, double omega_minus);

/// Conserved energy of the free four-derivative oscillator as a quadratic form
/// in (q, q', q'', q'''):
///   E = 1/2 w+^2 w-^2 q^2 + 1/2 (w+^2 + w-^2) q'^2 - 1/2 q''^2 + q' q'''.
Eigen::Matrix4d ostrogradski_energy_form(double omega_plus, double omega_minus);

/// Largest off-diagonal entry of T^T E T in mode coordinates; the diagonal is
/// (w+^2, 1, -w-^2, -1) / 2.
double block_diagonalization_residual(double omega_plus, double omega_minus);

struct PropagatorCheck {
  double lhs = 0.0;  ///< [1/(w^2 - w+^2) - 1/(w^2 - w-^2)] / (w-^2 - w+^2)
  double rhs = 0.0;  ///< -1 / [(w^2 - w-^2)(w^2 - w+^2)]
  double residual = 0.0;
  double relative_residual = 0.0;
};

PropagatorCheck propagator_identity(double omega, double omega_plus, double omega_minus);

struct ToyShift {
  /// c^2 [1/(w^2 - w+^2) - 1/(w^2 - w-^2)]
  double perturbative = 0.0;
  /// Exact eigenvalue shift of the level continuously connected to w^2.
  double exact = 0.0;
  double residual = 0.0;
};

/// Three states with squared energies (w^2, w+^2, w-^2) and metric
/// diag(1, 1, -1); |j> couples with strength c to |+> + |->.
ToyShift toy_second_order(double omega, double omega_plus, double omega_minus, double coupling);

}  // namespace krein
