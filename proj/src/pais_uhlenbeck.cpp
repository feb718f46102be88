#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>

#include "krein/oscillators.hpp"
#include "spectrum_window.hpp"

namespace krein {
namespace {

SparseMatrix diag(const Eigen::VectorXd& d) {
  SparseMatrix out(d.size(), d.size());
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, Complex(d(i)));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix identity(Index n) {
  SparseMatrix out(n, n);
  out.setIdentity();
  return out;
}

template <typename Solve>
std::vector<ScanPoint> run_scan(const std::vector<double>& g_values, int jobs, Solve&& solve) {
  std::vector<ScanPoint> out(g_values.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < g_values.size(); i = next++) {
      out[i].g = g_values[i];
      try {
        out[i].result = solve(g_values[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, static_cast<int>(std::max<size_t>(g_values.size(), 1)));
  if (n_threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace

SparseKreinOperator pu_hamiltonian(const PaisUhlenbeckSpec& spec, FirstDerivative q1_derivative,
                                   Laplacian q2_laplacian) {
  if (!(spec.omega_plus > 0.0) || !(spec.omega_minus > spec.omega_plus))
    throw std::invalid_argument("pu_hamiltonian: need 0 < omega_plus < omega_minus");
  const double a = spec.omega_plus * spec.omega_plus, b = spec.omega_minus * spec.omega_minus;
  const Grid1D& g1 = spec.grid1;
  const Grid1D& g2 = spec.grid2;
  const Eigen::VectorXd x1 = g1.points(), x2 = g2.points();
  const Index n1 = g1.size(), n2 = g2.size();

  const Eigen::VectorXd v1 = 0.5 * a * b * x1.array().square() + spec.g * x1.array().cube() +
                             spec.lambda * x1.array().square().square();
  const Eigen::VectorXd v2 = 0.5 * (a + b) * x2.array().square();
  const SparseMatrix d1 = first_derivative(g1, q1_derivative);
  const SparseMatrix lap2 = laplacian(g2, q2_laplacian);

  SparseMatrix h = -SparseMatrix(Eigen::kroneckerProduct(diag(x2), d1));
  h += SparseMatrix(Eigen::kroneckerProduct(identity(n2), diag(v1)));
  h += SparseMatrix(Eigen::kroneckerProduct(diag(v2), identity(n1)));
  h -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(lap2, identity(n1)));
  h.prune(Complex(0.0));

  SparseKreinOperator out(std::move(h),
                          IndefiniteMetric::kron(IndefiniteMetric::reflection(n2), IndefiniteMetric::identity(n1)));
  const double defect = self_adjoint_defect(out);
  if (defect > 1e-10)
    throw NumericalFailure("pu_hamiltonian: Hamiltonian is not Krein-self-adjoint (defect " + std::to_string(defect) + ")");
  return out;
}

LatticeSpectrum pu_spectrum(const PaisUhlenbeckSpec& spec, Index n_levels, const PuSolveOptions& options) {
  if (n_levels < 1) throw std::invalid_argument("pu_spectrum: n_levels must be positive");
  const SparseKreinOperator h = pu_hamiltonian(spec, options.q1_derivative, options.q2_laplacian);
  EigensolverOptions solver = options.solver;
  solver.n_eigs = std::min<Index>(n_levels + options.extra_levels, h.dimension() - 2);
  solver.shift = 0.5 * (spec.omega_plus + spec.omega_minus) - options.shift_below_ground;
  const EigenPairs pairs = lowest_eigenpairs(h.matrix(), solver);

  LatticeSpectrum out;
  out.spectrum = detail::classify_window(pairs, h.metric(), n_levels, options.classify);
  for (const auto& e : out.spectrum.entries) out.boundary_mass.push_back(boundary_mass(e.vector, spec.grid1, spec.grid2));
  out.iterative = pairs.iterative;
  return out;
}

std::vector<ScanPoint> pu_spectrum_scan(const PaisUhlenbeckSpec& spec, const std::vector<double>& g_values,
                                        Index n_levels, double lambda_over_g, int jobs,
                                        const PuSolveOptions& options) {
  return run_scan(g_values, jobs, [&](double g) {
    PaisUhlenbeckSpec point = spec;
    point.g = g;
    point.lambda = lambda_over_g * g;
    return pu_spectrum(point, n_levels, options);
  });
}

std::vector<ScanPoint> ghost_oscillator_scan(const Grid1D& grid, const PotentialSpec& potential,
                                             const std::vector<double>& g_values, Index n_levels, int jobs,
                                             const LatticeOptions& options) {
  return run_scan(g_values, jobs, [&](double g) {
    PotentialSpec point = potential;
    point.g = g;
    return ghost_oscillator_spectrum(grid, point, n_levels, options);
  });
}

}  // namespace krein
