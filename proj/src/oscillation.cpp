#include "krein/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace krein {
namespace {

constexpr double kUnitConversion = 1.267;

void require_increasing(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string("contour_scan: empty ") + name + " grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument(std::string("contour_scan: ") + name + " grid is not increasing");
}

double midpoint(double a, double b) { return a > 0.0 && b > 0.0 ? std::sqrt(a * b) : 0.5 * (a + b); }

double sinh2(double x) {
  const double s = std::sinh(x);
  return s * s;
}

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

}  // namespace

double p_plus_phase(double theta, double phase) {
  if (theta == 0.0) return 0.0;
  const double h = sin2(0.5 * phase);
  if (h == 0.0) return 0.0;
  const double s = sinh2(2.0 * theta);
  return h / (1.0 / s + 2.0 * h);
}

double p_plus(const TwoStateParams& params, double t) { return p_plus_phase(params.theta, params.delta_e() * t); }

double p_minus(const TwoStateParams& params, double t) { return 1.0 - p_plus(params, t); }

TimeAverage time_average_p_plus(double theta, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("time_average_p_plus: need at least two grid points");
  TimeAverage out;
  const double root = 1.0 / std::sqrt(std::cosh(4.0 * theta));
  out.closed_form = 0.5 * (1.0 - root);
  out.reciprocal = 1.0 / (2.0 * (1.0 - root));
  // Periodic rectangle rule; converges geometrically for this smooth integrand.
  double sum = 0.0;
  for (int j = 0; j < grid_points; ++j) sum += p_plus_phase(theta, 2.0 * std::numbers::pi * j / grid_points);
  out.numerical = sum / grid_points;
  return out;
}

double s_factor(double dm2, double l_over_e) {
  if (dm2 < 0.0 || l_over_e < 0.0) throw std::invalid_argument("s_factor: inputs must be non-negative");
  return sin2(kUnitConversion * dm2 * l_over_e);
}

double SterileParams::angle(Flavour f) const {
  switch (f) {
    case Flavour::E: return theta_es;
    case Flavour::Mu: return theta_mus;
    case Flavour::Tau: return theta_taus;
  }
  return 0.0;
}

double prob_3m1(Channel channel, double s, const SterileParams& params) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("prob_3m1: S must lie in [0, 1]");
  const double cosh_sum = std::cosh(2.0 * params.theta_es) + std::cosh(2.0 * params.theta_mus) +
                          std::cosh(2.0 * params.theta_taus);
  const double ta = params.angle(channel.from);
  const double denominator = 1.0 - 4.0 * s * sinh2(ta) * (1.0 - cosh_sum);
  if (channel.from == channel.to) return (1.0 + s * sinh2(2.0 * ta)) / denominator;
  return 4.0 * s * sinh2(ta) * sinh2(params.angle(channel.to)) / denominator;
}

double prob_3p1(Channel channel, double s, const SterileParams& params) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("prob_3p1: S must lie in [0, 1]");
  const double ce = std::cos(params.theta_es), cm = std::cos(params.theta_mus);
  auto u2 = [&](Flavour f) {
    switch (f) {
      case Flavour::E: return sin2(params.theta_es);
      case Flavour::Mu: return ce * ce * sin2(params.theta_mus);
      case Flavour::Tau: return ce * ce * cm * cm * sin2(params.theta_taus);
    }
    return 0.0;
  };
  const double ua = u2(channel.from);
  if (channel.from == channel.to) return 1.0 - 4.0 * s * ua * (1.0 - ua);
  return 4.0 * s * ua * u2(channel.to);
}

std::string model_tag(MixingModel model) { return model == MixingModel::ThreeMinusOne ? "3m1" : "3p1"; }

double channel_probability(Channel channel, MixingModel model, double theta, double dm2, double l_over_e) {
  SterileParams params;
  params.dm2 = dm2;
  params.l_over_e = l_over_e;
  auto set = [&](Flavour f) {
    if (f == Flavour::E) params.theta_es = theta;
    if (f == Flavour::Mu) params.theta_mus = theta;
    if (f == Flavour::Tau) params.theta_taus = theta;
  };
  set(channel.from);
  set(channel.to);
  const double s = s_factor(dm2, l_over_e);
  const double p = model == MixingModel::ThreeMinusOne ? prob_3m1(channel, s, params) : prob_3p1(channel, s, params);
  return channel.from == channel.to ? 1.0 - p : p;
}

std::vector<ContourCell> contour_scan(Channel channel, const std::vector<double>& levels,
                                      const std::vector<double>& dm2_grid,
                                      const std::vector<double>& theta_grid, double l_over_e) {
  require_increasing(dm2_grid, "dm2");
  require_increasing(theta_grid, "theta");
  const size_t nd = dm2_grid.size(), nt = theta_grid.size();
  std::vector<ContourCell> out;
  for (MixingModel model : {MixingModel::ThreeMinusOne, MixingModel::ThreePlusOne}) {
    std::vector<double> values(nd * nt);
    for (size_t i = 0; i < nd; ++i)
      for (size_t j = 0; j < nt; ++j)
        values[i * nt + j] = channel_probability(channel, model, theta_grid[j], dm2_grid[i], l_over_e);
    for (double level : levels)
      for (size_t i = 0; i + 1 < nd; ++i)
        for (size_t j = 0; j + 1 < nt; ++j) {
          if (model == MixingModel::ThreePlusOne && theta_grid[j + 1] > 0.5 * std::numbers::pi) continue;
          int above = 0;
          for (size_t di : {i, i + 1})
            for (size_t dj : {j, j + 1}) above += values[di * nt + dj] >= level;
          if (above == 0 || above == 4) continue;
          out.push_back({level, midpoint(dm2_grid[i], dm2_grid[i + 1]), midpoint(theta_grid[j], theta_grid[j + 1]), model});
        }
  }
  std::stable_sort(out.begin(), out.end(), [](const ContourCell& a, const ContourCell& b) { return a.level < b.level; });
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

OracleResult evolve_oracle(const TwoStateParams& params, double t, const ClassifyOptions& options) {
  const double ch = std::cosh(params.theta), sh = std::sinh(params.theta);
  const IndefiniteMetric eta = IndefiniteMetric::signature(1, 1);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = params.e_plus;
  h(1, 1) = params.e_minus;
  // Columns |A+>, |A->; eta-orthonormal with norms (+1, -1).
  Matrix basis(2, 2);
  basis << ch, sh, sh, ch;
  const Matrix inverse = eta.dense() * basis.adjoint() * eta.dense();
  Matrix flavour_eigs = Matrix::Zero(2, 2);
  flavour_eigs(0, 0) = 1.0;
  flavour_eigs(1, 1) = -1.0;
  const KreinOperator flavour(basis * flavour_eigs * inverse, eta);

  const StateVector psi0 = basis.col(1);
  const StateVector psi = evolve(KreinOperator(h, eta), t, psi0, options);
  OracleResult out;
  for (const Outcome& o : observable_probabilities(flavour, psi, options)) {
    if (std::abs(o.eigenvalue - Complex(1.0)) < 1e-6)
      out.p_plus += o.weight;
    else
      out.p_minus += o.weight;
  }
  out.eta_norm = indefinite_norm(eta, psi);
  return out;
}

}  // namespace krein
