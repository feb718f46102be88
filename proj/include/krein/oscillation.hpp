#pragma once

#include <string>
#include <vector>

#include "krein/krein_core.hpp"

namespace krein {

/// Two states |E+> (positive norm) and |E-> (negative norm) mixed by a
/// hyperbolic angle: |A+> = cosh(theta)|E+> + sinh(theta)|E->,
/// |A-> = sinh(theta)|E+> + cosh(theta)|E->.
struct TwoStateParams {
  double theta = 0.0;
  double e_plus = 1.0;
  double e_minus = 0.0;

  double delta_e() const { return e_plus - e_minus; }
};

/// Probability to find |A+> at time t starting from |A->:
///   P+ = sin^2(dE t / 2) / (coth^2(2 theta) - cos(dE t)).
/// Evaluated as h / (1/s + 2h), h = sin^2(dE t / 2), s = sinh^2(2 theta),
/// which avoids the cancellation in the denominator at small phase.
double p_plus(const TwoStateParams& params, double t);
double p_minus(const TwoStateParams& params, double t);

/// P+ as a function of the phase dE t only.
double p_plus_phase(double theta, double phase);

struct TimeAverage {
  /// 1/2 (1 - cosh(4 theta)^{-1/2})
  double closed_form = 0.0;
  /// 1 / [2 (1 - cosh(4 theta)^{-1/2})]; exceeds 1/2, so never the true average.
  double reciprocal = 0.0;
  /// Mean of P+ over one period on a uniform 10^4-point phase grid.
  double numerical = 0.0;
};

TimeAverage time_average_p_plus(double theta, int grid_points = 10000);

/// Conventional oscillation factor sin^2(1.267 dm2 L/E) with dm2 in eV^2 and
/// L/E in km/GeV.
double s_factor(double dm2, double l_over_e);

enum class Flavour { E, Mu, Tau };

struct Channel {
  Flavour from = Flavour::Mu;
  Flavour to = Flavour::E;
};

/// Hyperbolic active-sterile angles of the 3-1 scheme (negative-norm sterile
/// state), or ordinary mixing angles when fed to the 3+1 formulas.
struct SterileParams {
  double theta_es = 0.0;
  double theta_mus = 0.0;
  double theta_taus = 0.0;
  double dm2 = 1.0;
  double l_over_e = 1.0;

  double angle(Flavour f) const;
};

/// 3-1 probabilities. Disappearance
///   P_aa = (1 + S sinh^2 2t_a) / (1 - 4S sinh^2 t_a (1 - sum_l cosh 2t_l)),
/// appearance a -> b
///   P_ab = 4S sinh^2 t_a sinh^2 t_b / (1 - 4S sinh^2 t_a (1 - sum_l cosh 2t_l)).
/// The denominator carries the initial flavour, so P_ab != P_ba in general.
/// Channels other than ee and mu->e follow by relabelling flavours.
double prob_3m1(Channel channel, double s, const SterileParams& params);

/// Ordinary 3+1 probabilities for the unitary parameterization
/// |U_e4| = sin t_e, |U_mu4| = cos t_e sin t_mu, |U_tau4| = cos t_e cos t_mu sin t_tau:
///   P_aa = 1 - 4S |U_a4|^2 (1 - |U_a4|^2),  P_ab = 4S |U_a4|^2 |U_b4|^2.
double prob_3p1(Channel channel, double s, const SterileParams& params);

enum class MixingModel { ThreeMinusOne, ThreePlusOne };

std::string model_tag(MixingModel model);

struct ContourCell {
  double level = 0.0;
  double dm2 = 0.0;
  double theta = 0.0;
  MixingModel model = MixingModel::ThreeMinusOne;
};

/// Transition probability plotted in the (theta, dm2) plane: appearance
/// channels set t_from = t_to = theta, disappearance channels report
/// 1 - P_aa with t_a = theta. Remaining angles are zero.
double channel_probability(Channel channel, MixingModel model, double theta, double dm2, double l_over_e);

/// Grid cells (centre coordinates) whose corner values straddle a level,
/// ordered by level, model, dm2 index, theta index. The 3+1 model is only
/// scanned where theta <= pi/2.
std::vector<ContourCell> contour_scan(Channel channel, const std::vector<double>& levels,
                                      const std::vector<double>& dm2_grid,
                                      const std::vector<double>& theta_grid, double l_over_e);

/// n points log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct OracleResult {
  double p_plus = 0.0;
  double p_minus = 0.0;
  /// <psi(t)|psi(t)>_eta, -1 for the initial |A->.
  double eta_norm = 0.0;
};

/// Independent route to P+-: evolves |A-> under diag(E+, E-) and reads the
/// outcome probabilities of the flavour observable with eigenstates |A+->.
OracleResult evolve_oracle(const TwoStateParams& params, double t, const ClassifyOptions& options = {});

}  // namespace krein
