#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "krein/oscillators.hpp"
#include "krein/reports.hpp"

using namespace krein;
using test::max_abs;

TEST_CASE("ladder truncation") {
  const LadderTruncation t = ladder_truncation(4);
  const auto s = classify_spectrum(KreinOperator(t.h, t.metric));
  for (size_t k = 0; k < 4; ++k) {
    CHECK(s.entries[k].eigenvalue.real() == doctest::Approx(k + 0.5).epsilon(1e-14));
    CHECK(s.entries[k].norm_class == (k % 2 == 0 ? NormClass::Positive : NormClass::Negative));
  }
  CHECK(commutator_defect(t) < 1e-12);
  CHECK(commutator_defect(ladder_truncation(30)) < 1e-12);
  // q and p are self-adjoint under the alternating metric.
  CHECK(is_self_adjoint(KreinOperator(t.q, t.metric), 1e-14));
  CHECK(is_self_adjoint(KreinOperator(t.p, t.metric), 1e-14));
  CHECK_THROWS_AS(ladder_truncation(1), std::invalid_argument);
}

TEST_CASE("ghost operator from the evolution operator at half period") {
  const LadderTruncation two = ladder_truncation(2);
  const Matrix g = Complex(0, 1) * (Complex(0, -M_PI) * two.h).exp();
  CHECK(max_abs(Matrix(g - test::mat2(1, 0, 0, -1))) < 1e-15);
  CHECK(ghost_from_evolution(two).residual < 1e-15);

  const auto r = ghost_from_evolution(ladder_truncation(20));
  CHECK(r.residual < 1e-10);
  CHECK(r.anticommutator < 1e-10);
}

TEST_CASE("free ghost oscillator on the lattice") {
  const Grid1D grid(10.0, 201);
  const auto h = ghost_oscillator_hamiltonian(grid, {});
  CHECK(self_adjoint_defect(h) < 1e-12);
  const LatticeSpectrum s = ghost_oscillator_spectrum(grid, {}, 10);
  REQUIRE(s.spectrum.entries.size() == 10);
  for (size_t k = 0; k < 10; ++k) {
    const auto& e = s.spectrum.entries[k];
    CHECK(std::abs(e.eigenvalue - Complex(k + 0.5)) < 2e-3);
    CHECK(e.norm_class == (k % 2 == 0 ? NormClass::Positive : NormClass::Negative));
    CHECK(s.boundary_mass[k] < 1e-6);
  }
  CHECK(s.convergence_shift < 2e-3);
}

TEST_CASE("linear term shifts the spectrum by k^2/2") {
  const double k = 0.5;
  PotentialSpec v;
  v.k_lin = k;
  const LatticeSpectrum s = ghost_oscillator_spectrum(Grid1D(10.0, 201), v, 4);
  for (size_t n = 0; n < 4; ++n) CHECK(std::abs(s.spectrum.entries[n].eigenvalue - Complex(n + 0.5 + 0.5 * k * k)) < 2e-3);
}

TEST_CASE("written-out potential adds to the free quadratic term") {
  // quad = -1/2 doubles the quadratic part of H, giving frequency sqrt(2).
  PotentialSpec v;
  v.quad_coeff = -0.5;
  const LatticeSpectrum s = ghost_oscillator_spectrum(Grid1D(10.0, 201), v, 3);
  for (size_t n = 0; n < 3; ++n)
    CHECK(std::abs(s.spectrum.entries[n].eigenvalue - Complex(std::sqrt(2.0) * (n + 0.5))) < 2e-3);
}

TEST_CASE("cubic coupling of the ghost oscillator creates no null states") {
  const auto scan = ghost_oscillator_scan(Grid1D(10.0, 201), {}, {0.0, 0.2, 0.4}, 6, 2);
  for (const auto& p : scan) {
    REQUIRE(p.result);
    CHECK(p.result->spectrum.null_pair_count() == 0);
    CHECK(p.result->convergence_shift < 2e-2);
  }
}

TEST_CASE("Pais-Uhlenbeck free spectrum") {
  const PaisUhlenbeckSpec spec;
  const auto h = pu_hamiltonian(spec);
  CHECK(self_adjoint_defect(h) < 1e-12);
  const LatticeSpectrum s = pu_spectrum(spec, 5);
  const double expected[] = {1.25, 2.25, 2.75, 3.25, 3.75};
  const NormClass norms[] = {NormClass::Positive, NormClass::Positive, NormClass::Negative, NormClass::Positive,
                             NormClass::Negative};
  REQUIRE(s.spectrum.entries.size() == 5);
  for (size_t k = 0; k < 5; ++k) {
    CHECK(std::abs(s.spectrum.entries[k].eigenvalue - expected[k]) < 5e-3);
    CHECK(s.spectrum.entries[k].norm_class == norms[k]);
    CHECK(s.boundary_mass[k] < 1e-6);
  }
  CHECK_FALSE(s.spectrum.has_null_pairs());
  CHECK_THROWS_AS(pu_hamiltonian(PaisUhlenbeckSpec{1.5, 1.0}), std::invalid_argument);
}

TEST_CASE("Pais-Uhlenbeck coupling scan") {
  PaisUhlenbeckSpec spec;
  const auto serial = pu_spectrum_scan(spec, {0.0, 0.3}, 8, 0.5, 1);
  REQUIRE(serial[0].result);
  REQUIRE(serial[1].result);
  CHECK(serial[0].result->spectrum.null_pair_count() == 0);
  CHECK(serial[1].result->spectrum.null_pair_count() > 0);
  for (const auto& e : serial[1].result->spectrum.entries)
    if (e.norm_class == NormClass::Null) CHECK(std::abs(e.eigenvalue.imag()) > 1e-3);
  for (double m : serial[1].result->boundary_mass) CHECK(m < 1e-6);

  const auto parallel = pu_spectrum_scan(spec, {0.0, 0.3}, 8, 0.5, 2);
  CHECK(spectrum4d_table(serial, 1.0, 1.5).str() == spectrum4d_table(parallel, 1.0, 1.5).str());
}

TEST_CASE("scan failures are captured per point") {
  PaisUhlenbeckSpec spec;
  spec.omega_minus = 0.5;  // invalid ordering of frequencies
  const auto scan = pu_spectrum_scan(spec, {0.0, 0.1}, 4);
  for (const auto& p : scan) {
    CHECK_FALSE(p.result);
    CHECK_FALSE(p.error.empty());
  }
}

TEST_CASE("mode decomposition") {
  const ModeDecomposition m = mode_decomposition(1.0, 2.0);
  CHECK((m.to_modes * m.from_modes - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((m.from_modes * m.to_modes - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  // q'' = -(q+ + 4 q-) / sqrt(3)
  CHECK(m.from_modes(1, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)));
  CHECK(m.from_modes(1, 1) == doctest::Approx(-4.0 / std::sqrt(3.0)));
  CHECK(block_diagonalization_residual(1.0, 2.0) < 1e-12);
  CHECK(block_diagonalization_residual(0.7, 3.1) < 1e-12);
  CHECK_THROWS_AS(mode_decomposition(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("mode solutions solve the four-derivative equation") {
  // q = from_modes row 0 applied to (cos w+ t, cos w- t) obeys
  // q'''' + (w+^2 + w-^2) q'' + w+^2 w-^2 q = 0.
  const double wp = 0.8, wm = 1.9;
  const ModeDecomposition m = mode_decomposition(wp, wm);
  for (double t : {0.0, 0.4, 1.7}) {
    const double qp = std::cos(wp * t), qm = std::cos(wm * t);
    const double q = m.from_modes(0, 0) * qp + m.from_modes(0, 1) * qm;
    const double q2 = m.from_modes(1, 0) * qp + m.from_modes(1, 1) * qm;
    const double q2_direct = -wp * wp * m.from_modes(0, 0) * qp - wm * wm * m.from_modes(0, 1) * qm;
    CHECK(q2 == doctest::Approx(q2_direct).epsilon(1e-14));
    const double q4 = std::pow(wp, 4) * m.from_modes(0, 0) * qp + std::pow(wm, 4) * m.from_modes(0, 1) * qm;
    CHECK(std::abs(q4 + (wp * wp + wm * wm) * q2 + wp * wp * wm * wm * q) < 1e-13);
  }
}

TEST_CASE("propagator identity") {
  const PropagatorCheck zero = propagator_identity(0.0, 1.0, 2.0);
  CHECK(zero.lhs == -0.25);
  CHECK(zero.rhs == -0.25);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double wp = u(rng), wm = wp + u(rng), w = u(rng);
    if (std::abs(w - wp) < 1e-3 || std::abs(w - wm) < 1e-3) continue;
    worst = std::max(worst, propagator_identity(w, wp, wm).relative_residual);
  }
  CHECK(worst < 1e-12);

  std::vector<double> omegas{1e2, 1e3, 1e4}, values;
  for (double w : omegas) values.push_back(std::abs(propagator_identity(w, 1.0, 1.5).lhs));
  CHECK(test::log_slope(omegas, values) == doctest::Approx(-4.0).epsilon(0.01 / 4.0));

  CHECK_THROWS_AS(propagator_identity(1.0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(propagator_identity(0.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("second-order shift in the three-state toy model") {
  CHECK(toy_second_order(1.0, 1.5, 2.0, 0.0).exact == 0.0);
  CHECK(toy_second_order(1.0, 1.5, 2.0, 0.0).perturbative == 0.0);

  // Below both levels the |+> term lowers the energy and the |-> term raises it.
  const ToyShift s = toy_second_order(1.0, 1.5, 2.0, 0.01);
  const double plus_term = 1e-4 / (1.0 - 2.25), minus_term = -1e-4 / (1.0 - 4.0);
  CHECK(plus_term < 0.0);
  CHECK(minus_term > 0.0);
  CHECK(s.perturbative == doctest::Approx(plus_term + minus_term).epsilon(1e-14));

  std::vector<double> couplings{1e-2, 5e-3, 2.5e-3}, residuals;
  for (double c : couplings) residuals.push_back(toy_second_order(1.0, 1.5, 2.0, c).residual);
  CHECK(test::log_slope(couplings, residuals) == doctest::Approx(4.0).epsilon(0.2 / 4.0));
  CHECK_THROWS_AS(toy_second_order(1.0, 1.5, 2.0, 1.0), std::invalid_argument);
}
