#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "krein/krein_core.hpp"

namespace krein {

/// Occupation counts (k_1 ... k_N) with sum n.
using Composition = std::vector<int>;

inline constexpr std::uint64_t kDefaultMaxTerms = 5'000'000;

/// C(n+N-1, N-1), saturating at UINT64_MAX.
std::uint64_t composition_count(int n, int base_dim);

/// Steps `k` to the next composition in colexicographic order (compare
/// k_N first, then k_{N-1}, ...). The first composition is (n, 0, ..., 0).
/// Returns false after the last one, (0, ..., 0, n).
bool next_composition(Composition& k);

/// Coefficients of |psi>^{(x)n} on the symmetrized basis |A_1^{k_1} ... A_N^{k_N}>,
///   c_k = c_1^{k_1} ... c_N^{k_N} sqrt(n! / (k_1! ... k_N!)),
/// stored as log|c_k| and arg c_k because the magnitudes leave double range
/// long before the term count becomes a problem.
class RepeatedStateExpansion {
 public:
  int n() const { return n_; }
  int base_dim() const { return base_dim_; }
  std::size_t size() const { return log_magnitude_.size(); }

  /// Composition of term `t` (colex order).
  Composition composition(std::size_t t) const;
  int count(std::size_t t, int i) const { return counts_[t * static_cast<std::size_t>(base_dim_) + static_cast<std::size_t>(i)]; }
  /// -infinity marks an exactly vanishing coefficient.
  double log_magnitude(std::size_t t) const { return log_magnitude_[t]; }
  double phase(std::size_t t) const { return phase_[t]; }
  /// exp(log_magnitude) e^{i phase}; under/overflows for extreme n.
  Complex coefficient(std::size_t t) const;
  /// Index of the term with composition k, or size() when absent.
  std::size_t find(const Composition& k) const;

 private:
  friend RepeatedStateExpansion expand(const StateVector& c, int n, std::uint64_t max_terms);
  friend RepeatedStateExpansion rate_apply(const RepeatedStateExpansion& e, int i);

  int n_ = 0;
  int base_dim_ = 0;
  std::vector<int> counts_;
  std::vector<double> log_magnitude_;
  std::vector<double> phase_;
};

RepeatedStateExpansion expand(const StateVector& c, int n, std::uint64_t max_terms = kDefaultMaxTerms);

/// Applies the rate operator P_i = (1/n) sum_j Pi_i^{(j)}, diagonal with
/// eigenvalue k_i / n on each symmetrized basis state.
RepeatedStateExpansion rate_apply(const RepeatedStateExpansion& e, int i);

struct AverageCheck {
  Complex lhs;  ///< <psi^n|A^(n)|psi^n> / <psi^n|psi^n>, summed over compositions
  Complex rhs;  ///< <psi|A|psi> / <psi|psi>
};

/// The tensor-power average of A, A^(n) = (1/n) sum_j A_j, evaluated in the
/// eigenbasis of A with the n-fold product metric. A must have no null
/// eigenvectors and psi a non-null indefinite norm.
AverageCheck average_check(const KreinOperator& a, const StateVector& psi, int n,
                           std::uint64_t max_terms = kDefaultMaxTerms, const ClassifyOptions& options = {});

/// <psi^n|psi^n> for the product metric with signs N_i, summed over
/// compositions. Equals (sum_i N_i |c_i|^2)^n; overflows double for large n.
double repeated_norm(const std::vector<int>& metric_signs, const StateVector& c, int n,
                     std::uint64_t max_terms = kDefaultMaxTerms);

/// <psi^n|P_i^m|psi^n> / <psi^n|psi^n> for c given in the eigenbasis of the
/// projectors, with norm signs N_i.
double norm_moment(const std::vector<int>& metric_signs, const StateVector& c, int i, int m, int n,
                   std::uint64_t max_terms = kDefaultMaxTerms);

struct ConvergenceReport {
  int n = 0;
  int target_index = 0;
  /// max_k |p_i - k_i/n| |c_k| / max_k (k_i/n) |c_k|
  double projective_residual = 0.0;
  /// Largest |c_k|; ties go to the lexicographically smaller composition.
  Composition peak_location;
  /// (k_i/n) / p_i at the peak.
  double peak_value_ratio = 0.0;
};

/// Compares p_i |psi^n> with P_i |psi^n>, p_i = |c_i|^2 / sum_j |c_j|^2, after
/// scaling both by the largest projected coefficient.
ConvergenceReport coefficient_convergence(const StateVector& c, int i, int n,
                                          std::uint64_t max_terms = kDefaultMaxTerms);

struct GaussianSummary {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma2;
  /// Mean and covariance of k under the weights |c_k|^2 / sum |c_k|^2.
  Eigen::VectorXd empirical_mu;
  Eigen::MatrixXd empirical_sigma2;
};

/// mu_i = n p_i, sigma2_ij = n (p_i delta_ij - p_i p_j).
GaussianSummary gaussian_summary(const StateVector& c, int n, std::uint64_t max_terms = kDefaultMaxTerms);

struct ProductMoment {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the product operator A (x) ... (x) A, eigenvalue
/// prod_i a_i^{k_i}, under the distribution |c_k|^2 / sum |c_k|^2.
ProductMoment product_operator_moment(const std::vector<double>& a_eigs, const StateVector& c, int n,
                                      std::uint64_t max_terms = kDefaultMaxTerms);

/// max |[A^(n), B^(n)] - [A, B]^(n) / n| from explicit Kronecker sums.
/// Requires dim^n <= 4096.
double commutator_scaling_check(const KreinOperator& a, const KreinOperator& b, int n);

/// A^(n) = (1/n) sum_j 1 (x) ... (x) A_j (x) ... (x) 1 as an explicit matrix.
SparseMatrix tensor_average(const Matrix& a, int n);

}  // namespace krein
