#pragma once

#include "krein/eigensolver.hpp"
#include "krein/krein_core.hpp"

namespace krein::detail {

/// Classifies the computed eigenpairs and keeps the lowest `n_levels`,
/// extended by one when the cut separates a null pair. Eigenpairs at the top
/// of the computed set are discarded while their null partner is missing.
SpectralClassification classify_window(const EigenPairs& pairs, const IndefiniteMetric& metric, Index n_levels,
                                       const ClassifyOptions& options);

}  // namespace krein::detail
