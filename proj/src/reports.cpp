#include "krein/reports.hpp"

#include <algorithm>
#include <cmath>

#include "krein/repeated_states.hpp"

namespace krein {
namespace {

void add_spectrum_rows(CsvTable& table, const ScanPoint& point, const std::vector<CsvCell>& suffix) {
  if (!point.result) return;
  const auto& entries = point.result->spectrum.entries;
  for (size_t i = 0; i < entries.size(); ++i) {
    std::vector<CsvCell> row{point.g, static_cast<long long>(i), entries[i].eigenvalue.real(),
                             entries[i].eigenvalue.imag(), norm_class_tag(entries[i])};
    row.insert(row.end(), suffix.begin(), suffix.end());
    table.add_row(row);
  }
}

}  // namespace

std::string norm_class_tag(const SpectralEntry& entry) {
  switch (entry.norm_class) {
    case NormClass::Positive: return "positive";
    case NormClass::Negative: return "negative";
    case NormClass::Null: return "null:" + std::to_string(entry.pair_id);
  }
  return "unknown";
}

CsvTable bells_table(double p, const std::vector<int>& ns) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bells: p must lie in [0, 1]");
  StateVector c(2);
  c << std::sqrt(p), std::sqrt(1.0 - p);
  CsvTable table({"n", "k", "coeff_state", "coeff_projected"});
  for (int n : ns) {
    const RepeatedStateExpansion e = expand(c, n);
    double log_scale = -INFINITY;
    for (size_t t = 0; t < e.size(); ++t)
      if (e.count(t, 0) > 0)
        log_scale = std::max(log_scale, e.log_magnitude(t) + std::log(static_cast<double>(e.count(t, 0)) / n));
    for (size_t t = 0; t < e.size(); ++t) {
      const int k = e.count(t, 0);
      const double mag = std::exp(e.log_magnitude(t) - log_scale);
      table.add_row({static_cast<long long>(n), static_cast<long long>(k), p * mag, (static_cast<double>(k) / n) * mag});
    }
  }
  return table;
}

CsvTable osc_table(const std::vector<double>& thetas, int phase_points, double max_phase) {
  if (phase_points < 2) throw std::invalid_argument("osc: need at least two phase points");
  CsvTable table({"theta", "phase", "p_plus", "p_minus"});
  for (double theta : thetas)
    for (int j = 0; j < phase_points; ++j) {
      const double phase = max_phase * j / (phase_points - 1);
      const double pp = p_plus_phase(theta, phase);
      table.add_row({theta, phase, pp, 1.0 - pp});
    }
  return table;
}

CsvTable contour_table(const std::vector<ContourCell>& cells) {
  CsvTable table({"level", "dm2", "theta", "model"});
  for (const auto& c : cells) table.add_row({c.level, c.dm2, c.theta, model_tag(c.model)});
  return table;
}

CsvTable spectrum2d_table(const std::vector<ScanPoint>& scan) {
  CsvTable table({"g", "level_index", "re_E", "im_E", "norm_class"});
  for (const auto& point : scan) add_spectrum_rows(table, point, {});
  return table;
}

CsvTable spectrum4d_table(const std::vector<ScanPoint>& scan, double omega_plus, double omega_minus) {
  CsvTable table({"g", "level_index", "re_E", "im_E", "norm_class", "omega_plus", "omega_minus"});
  for (const auto& point : scan) add_spectrum_rows(table, point, {omega_plus, omega_minus});
  return table;
}

CsvTable propcheck_table(const std::vector<double>& omegas, double omega_plus, double omega_minus) {
  CsvTable table({"omega", "lhs", "rhs", "residual"});
  for (double w : omegas) {
    const PropagatorCheck c = propagator_identity(w, omega_plus, omega_minus);
    table.add_row({w, c.lhs, c.rhs, c.residual});
  }
  return table;
}

}  // namespace krein
