#pragma once

#include <random>

#include "krein/krein_core.hpp"

namespace krein {

/// diag of +-1 with at least one entry of each sign when dim >= 2 and
/// `indefinite` is set; all +1 otherwise. Signs are shuffled.
IndefiniteMetric random_signature(Index dim, bool indefinite, std::mt19937_64& rng);

/// Entries with independent uniform(-1, 1) real and imaginary parts.
Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng);

/// exp(i K) with K = eta M, M Hermitian of spectral scale `scale`; satisfies
/// B^H eta B = eta.
Matrix random_pseudo_unitary(const IndefiniteMetric& metric, double scale, std::mt19937_64& rng);

/// B diag(values) B^{-1} with B pseudo-unitary: Krein-self-adjoint with a
/// real, null-free spectrum.
KreinOperator random_real_spectrum_operator(const IndefiniteMetric& metric, const Eigen::VectorXd& values,
                                            double scale, std::mt19937_64& rng);

/// Distinct eigenvalues drawn uniformly from [lo, hi] with spacing >= gap.
Eigen::VectorXd random_distinct_values(Index n, double lo, double hi, double gap, std::mt19937_64& rng);

}  // namespace krein
