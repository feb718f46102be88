#pragma once

#include <string>
#include <vector>

#include "krein/csv.hpp"
#include "krein/oscillation.hpp"
#include "krein/oscillators.hpp"

namespace krein {

/// "positive", "negative" or "null:<pair id>".
std::string norm_class_tag(const SpectralEntry& entry);

/// Bell curves of p|psi^n> and P_i|psi^n> for psi = (sqrt p, sqrt(1-p)),
/// i = 0: columns n, k, coeff_state, coeff_projected with k = k_1, both
/// coefficient moduli scaled by the largest projected one. Rows follow the
/// colex composition order for each n.
CsvTable bells_table(double p, const std::vector<int>& ns);

/// Columns theta, phase, p_plus, p_minus on a uniform phase grid [0, max_phase].
CsvTable osc_table(const std::vector<double>& thetas, int phase_points, double max_phase);

/// Columns level, dm2, theta, model.
CsvTable contour_table(const std::vector<ContourCell>& cells);

/// Columns g, level_index, re_E, im_E, norm_class; failed points are skipped.
CsvTable spectrum2d_table(const std::vector<ScanPoint>& scan);

/// spectrum2d columns plus omega_plus, omega_minus.
CsvTable spectrum4d_table(const std::vector<ScanPoint>& scan, double omega_plus, double omega_minus);

/// Columns omega, lhs, rhs, residual.
CsvTable propcheck_table(const std::vector<double>& omegas, double omega_plus, double omega_minus);

}  // namespace krein
