#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "krein/random_models.hpp"
#include "krein/repeated_states.hpp"

using namespace krein;
using test::mat2;
using test::vec;

namespace {

StateVector binary(double p) { return vec({std::sqrt(p), std::sqrt(1.0 - p)}); }

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

}  // namespace

TEST_CASE("compositions run in colex order") {
  Composition k{2, 0, 0};
  std::vector<Composition> seen{k};
  while (next_composition(k)) seen.push_back(k);
  const std::vector<Composition> expected{{2, 0, 0}, {1, 1, 0}, {0, 2, 0}, {1, 0, 1}, {0, 1, 1}, {0, 0, 2}};
  CHECK(seen == expected);
}

TEST_CASE("term count matches the stars-and-bars formula") {
  for (int dim = 2; dim <= 4; ++dim)
    for (int n : {1, 2, 5, 13}) {
      std::mt19937_64 rng(static_cast<unsigned>(dim * 100 + n));
      const StateVector c = random_complex(dim, 1, rng).col(0);
      const auto e = expand(c, n);
      CHECK(e.size() == composition_count(n, dim));
      CHECK(e.size() == static_cast<size_t>(std::llround(binomial(n + dim - 1, dim - 1))));
    }
  CHECK(composition_count(10, 1) == 1);
  CHECK(composition_count(3, 3) == 10);
}

TEST_CASE("expansion examples") {
  const Complex c1(0.6, 0.2), c2(-0.3, 0.5);
  const auto e = expand(vec({c1, c2}), 2);
  REQUIRE(e.size() == 3);
  CHECK(std::abs(e.coefficient(0) - c1 * c1) < 1e-15);
  CHECK(std::abs(e.coefficient(1) - std::sqrt(2.0) * c1 * c2) < 1e-15);
  CHECK(std::abs(e.coefficient(2) - c2 * c2) < 1e-15);
  CHECK(e.composition(1) == Composition{1, 1});
  CHECK(e.find({0, 2}) == 2);
  CHECK(e.find({3, 0}) == e.size());

  const auto pure = expand(vec({1, 0}), 17);
  for (size_t t = 0; t < pure.size(); ++t) {
    if (pure.count(t, 0) == 17)
      CHECK(pure.coefficient(t) == Complex(1.0));
    else
      CHECK(pure.coefficient(t) == Complex(0.0));
  }

  const auto bell = expand(binary(0.3), 100);
  size_t best = 0;
  for (size_t t = 1; t < bell.size(); ++t)
    if (bell.log_magnitude(t) > bell.log_magnitude(best)) best = t;
  CHECK(bell.count(best, 0) == 30);
}

TEST_CASE("large expansions stay finite in log form") {
  const auto e = expand(binary(0.3), 20000);
  for (size_t t = 0; t < e.size(); t += 997) CHECK(std::isfinite(e.log_magnitude(t)));
  CHECK_THROWS_AS(expand(vec({1, 1, 1, 1}), 400, 1000), std::invalid_argument);
}

TEST_CASE("rate operator action") {
  const auto same = rate_apply(expand(vec({1, 0}), 9), 0);
  CHECK(std::abs(same.coefficient(same.find({9, 0})) - 1.0) < 1e-15);

  const Complex c1(0.8), c2(0.6);
  const auto r = rate_apply(expand(vec({c1, c2}), 2), 0);
  CHECK(std::abs(r.coefficient(0) - c1 * c1) < 1e-15);
  CHECK(std::abs(r.coefficient(1) - 0.5 * std::sqrt(2.0) * c1 * c2) < 1e-15);
  CHECK(r.coefficient(2) == Complex(0.0));

  std::mt19937_64 rng(21);
  const auto e = expand(random_complex(3, 1, rng).col(0), 7);
  const auto r0 = rate_apply(e, 0), r1 = rate_apply(e, 1), r2 = rate_apply(e, 2);
  for (size_t t = 0; t < e.size(); ++t)
    CHECK(std::abs(r0.coefficient(t) + r1.coefficient(t) + r2.coefficient(t) - e.coefficient(t)) < 1e-14);
}

TEST_CASE("tensor-power averages") {
  SUBCASE("single copy") {
    const KreinOperator a(mat2(1, 0, 0, -2), IndefiniteMetric::signature(1, 1));
    const auto r = average_check(a, vec({0.9, Complex(0.1, 0.3)}), 1);
    CHECK(std::abs(r.lhs - r.rhs) < 1e-14);
  }
  SUBCASE("positive metric") {
    const KreinOperator a(mat2(0, 0, 0, 1), IndefiniteMetric::identity(2));
    const auto r = average_check(a, binary(0.3), 50);
    CHECK(r.lhs.real() == doctest::Approx(0.7).epsilon(1e-13));
    CHECK(r.rhs.real() == doctest::Approx(0.7).epsilon(1e-13));
  }
  SUBCASE("indefinite metric gives the signed weight") {
    const KreinOperator a(mat2(1, 0, 0, 0), IndefiniteMetric::signature(1, 1));
    const auto r = average_check(a, vec({std::sqrt(3.0), std::sqrt(2.0)}), 10);
    CHECK(r.lhs.real() == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(r.rhs.real() == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("combinatorial norm is the n-th power of the single-copy norm") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + trial % 3;
    std::vector<int> signs;
    for (int i = 0; i < dim; ++i) signs.push_back(trial % 2 == 0 ? 1 : (i % 2 == 0 ? 1 : -1));
    const IndefiniteMetric eta = IndefiniteMetric::diagonal(signs);
    StateVector c = random_complex(dim, 1, rng).col(0);
    c(0) *= 2.0;  // keep the indefinite norm away from zero
    const int n = 1 + trial;
    const double expected = std::pow(indefinite_norm(eta, c), n);
    CHECK(std::abs(repeated_norm(signs, c, n) - expected) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("coefficient convergence") {
  const auto exact = coefficient_convergence(vec({1, 0}), 0, 50);
  CHECK(exact.projective_residual == 0.0);
  for (double p : {0.2, 0.3, 0.5}) {
    const double r25 = coefficient_convergence(binary(p), 0, 25).projective_residual;
    const double r100 = coefficient_convergence(binary(p), 0, 100).projective_residual;
    const double r400 = coefficient_convergence(binary(p), 0, 400).projective_residual;
    CHECK(r100 < r25);
    CHECK(r400 < r100);
  }
  // The same residual for coefficients of an indefinite-norm state: the
  // coefficient limit ignores the norm signs.
  const StateVector mixed = vec({std::sqrt(3.0), std::sqrt(2.0)});
  const auto small = coefficient_convergence(mixed, 0, 25);
  const auto large = coefficient_convergence(mixed, 0, 1600);
  CHECK(large.projective_residual < small.projective_residual);
  CHECK(large.projective_residual < 0.05);
  CHECK(large.peak_value_ratio == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("norm moments") {
  const std::vector<int> positive{1, 1}, mixed{1, -1};
  CHECK(norm_moment(positive, binary(0.3), 0, 1, 40) == doctest::Approx(0.3).epsilon(1e-13));
  for (int n : {10, 100, 1000})
    CHECK(norm_moment(positive, binary(0.3), 0, 2, n) == doctest::Approx(0.09 + 0.21 / n).epsilon(1e-12));
  const StateVector psi = vec({std::sqrt(3.0), std::sqrt(2.0)});
  CHECK(norm_moment(mixed, psi, 0, 1, 12) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(norm_moment(mixed, psi, 1, 1, 12) == doctest::Approx(-2.0).epsilon(1e-12));

  const StateVector phased = vec({std::sqrt(0.3) * std::polar(1.0, 0.4), std::sqrt(0.7) * std::polar(1.0, -2.1)});
  CHECK(norm_moment(positive, phased, 0, 3, 30) == doctest::Approx(norm_moment(positive, binary(0.3), 0, 3, 30)));
}

TEST_CASE("Gaussian summary") {
  const auto g = gaussian_summary(binary(0.3), 1000);
  CHECK(g.mu(0) == doctest::Approx(300.0));
  CHECK(g.mu(1) == doctest::Approx(700.0));
  CHECK(g.sigma2(0, 0) == doctest::Approx(210.0));
  CHECK(g.sigma2(0, 1) == doctest::Approx(-210.0));
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(g.empirical_mu(i) - g.mu(i)) < 0.05 * g.mu(i));
    for (int j = 0; j < 2; ++j) CHECK(std::abs(g.empirical_sigma2(i, j) - g.sigma2(i, j)) < 0.05 * 210.0);
  }
  const auto pure = gaussian_summary(vec({1, 0}), 100);
  CHECK(pure.sigma2.cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(23);
  const auto three = gaussian_summary(random_complex(3, 1, rng).col(0), 200);
  CHECK((three.empirical_sigma2 - three.sigma2).cwiseAbs().maxCoeff() < 0.05 * three.sigma2.cwiseAbs().maxCoeff());
}

TEST_CASE("product operator moments") {
  const auto unit = product_operator_moment({1.0, 1.0}, binary(0.4), 30);
  CHECK(unit.mean == doctest::Approx(1.0));
  CHECK(std::abs(unit.variance) < 1e-14);

  // Brute force over all 2^n sign sequences.
  for (double p : {0.5, 0.9}) {
    for (int n : {4, 10, 16}) {
      double mean = 0.0, second = 0.0;
      for (long mask = 0; mask < (1L << n); ++mask) {
        const int minus = __builtin_popcountl(static_cast<unsigned long>(mask));
        const double prob = std::pow(1.0 - p, minus) * std::pow(p, n - minus);
        const double value = minus % 2 == 0 ? 1.0 : -1.0;
        mean += prob * value;
        second += prob;
      }
      const auto m = product_operator_moment({1.0, -1.0}, binary(p), n);
      CHECK(m.mean == doctest::Approx(mean).epsilon(1e-12).scale(1e-12));
      CHECK(m.variance == doctest::Approx(second - mean * mean).epsilon(1e-12));
    }
  }
  CHECK(product_operator_moment({1.0, -1.0}, binary(0.9), 25).mean == doctest::Approx(std::pow(0.8, 25)).epsilon(1e-12));
  CHECK(product_operator_moment({1.0, -1.0}, binary(0.5), 20).variance == doctest::Approx(1.0));
}

TEST_CASE("commutator scaling of tensor averages") {
  const IndefiniteMetric id = IndefiniteMetric::identity(2);
  const KreinOperator x(mat2(0, 1, 1, 0), id), y(mat2(0, Complex(0, -1), Complex(0, 1), 0), id);
  CHECK(commutator_scaling_check(x, y, 2) < 1e-12);
  const KreinOperator d1(mat2(1, 0, 0, 2), id), d2(mat2(-3, 0, 0, 0.5), id);
  CHECK(commutator_scaling_check(d1, d2, 3) == 0.0);

  std::mt19937_64 rng(24);
  const IndefiniteMetric eta = IndefiniteMetric::signature(1, 1);
  const auto a = random_real_spectrum_operator(eta, random_distinct_values(2, -1, 1, 0.2, rng), 0.5, rng);
  const auto b = random_real_spectrum_operator(eta, random_distinct_values(2, -1, 1, 0.2, rng), 0.5, rng);
  CHECK(commutator_scaling_check(a, b, 3) < 1e-12);
}

TEST_CASE("tensor average size limit") {
  CHECK_THROWS_AS(tensor_average(Matrix::Identity(4, 4), 7), std::invalid_argument);
  CHECK(tensor_average(Matrix::Identity(2, 2), 3).rows() == 8);
}
