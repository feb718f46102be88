#include "krein/repeated_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "big_float.hpp"

namespace krein {
namespace {

using detail::BigFloat;

void check_terms(int n, int base_dim, std::uint64_t max_terms, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be at least 1");
  if (base_dim < 2) throw std::invalid_argument(std::string(who) + ": need at least two basis states");
  const std::uint64_t terms = composition_count(n, base_dim);
  if (terms > max_terms)
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(terms) +
                                " compositions exceed the cap of " + std::to_string(max_terms));
}

Composition first_composition(int n, int base_dim) {
  Composition k(static_cast<size_t>(base_dim), 0);
  k[0] = n;
  return k;
}

std::vector<double> log_factorials(int n) {
  std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
  for (int k = 2; k <= n; ++k) out[static_cast<size_t>(k)] = out[static_cast<size_t>(k) - 1] + std::log(k);
  return out;
}

// Evaluates sum_k multinomial(k) prod_i x_i^{k_i} f(k) without the overall n!,
// i.e. sum_k prod_i (x_i^{k_i} / k_i!) f(k). `factor(k, out)` stores f(k);
// a null factor means f = 1.
template <typename Factor>
BigFloat composition_sum(const std::vector<double>& x, int n, mpfr_prec_t prec, Factor&& factor) {
  const size_t dim = x.size();
  std::vector<std::vector<BigFloat>> table(dim);
  for (size_t i = 0; i < dim; ++i) {
    table[i].reserve(static_cast<size_t>(n) + 1);
    BigFloat xi(prec, x[i]);
    table[i].emplace_back(prec, 1.0);
    for (int k = 1; k <= n; ++k) {
      BigFloat next(table[i].back());
      next *= xi;
      next /= static_cast<long>(k);
      table[i].push_back(std::move(next));
    }
  }
  BigFloat sum(prec), term(prec), f(prec), scratch(prec);
  Composition k = first_composition(n, static_cast<int>(dim));
  do {
    term.set(table[0][static_cast<size_t>(k[0])]);
    for (size_t i = 1; i < dim; ++i) term *= table[i][static_cast<size_t>(k[i])];
    if (term.is_zero()) continue;
    if (factor(k, f))
      sum.add_product(term, f, scratch);
    else
      sum += term;
  } while (next_composition(k));
  return sum;
}

struct NoFactor {
  bool operator()(const Composition&, BigFloat&) const { return false; }
};

// Signed squared moduli N_i |c_i|^2 and the precision that resolves their
// n-fold cancellation. Throws on a null-norm state.
std::vector<double> signed_weights(const std::vector<int>& signs, const StateVector& c, const char* who) {
  if (signs.size() != static_cast<size_t>(c.size()))
    throw std::invalid_argument(std::string(who) + ": metric_signs and c differ in length");
  std::vector<double> x(signs.size());
  double total = 0.0, magnitude = 0.0;
  for (size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument(std::string(who) + ": signs must be +1 or -1");
    x[i] = signs[i] * std::norm(c(static_cast<Index>(i)));
    total += x[i];
    magnitude += std::abs(x[i]);
  }
  if (magnitude == 0.0 || std::abs(total) <= 1e-14 * magnitude)
    throw std::invalid_argument(std::string(who) + ": state has null norm");
  return x;
}

mpfr_prec_t precision_for(const std::vector<double>& x, int n, std::uint64_t terms) {
  double abs_sum = 0.0, sum = 0.0;
  for (double v : x) {
    abs_sum += std::abs(v);
    sum += v;
  }
  return detail::cancellation_precision(abs_sum, sum, n, static_cast<double>(terms));
}

std::vector<double> probabilities(const StateVector& c) {
  const double total = c.squaredNorm();
  if (total == 0.0) throw std::invalid_argument("zero state vector");
  std::vector<double> p(static_cast<size_t>(c.size()));
  for (Index i = 0; i < c.size(); ++i) p[static_cast<size_t>(i)] = std::norm(c(i)) / total;
  return p;
}

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

}  // namespace

std::uint64_t composition_count(int n, int base_dim) {
  if (n < 0 || base_dim < 1) return 0;
  // C(n + N - 1, N - 1) built incrementally; each partial product is itself a
  // binomial coefficient, so the division is exact.
  const std::uint64_t r = static_cast<std::uint64_t>(base_dim - 1);
  std::uint64_t out = 1;
  for (std::uint64_t j = 1; j <= r; ++j) {
    const std::uint64_t top = static_cast<std::uint64_t>(n) + j;
    if (out > std::numeric_limits<std::uint64_t>::max() / top) return std::numeric_limits<std::uint64_t>::max();
    out = out * top / j;
  }
  return out;
}

bool next_composition(Composition& k) {
  int head = 0;
  for (size_t j = 1; j < k.size(); ++j) {
    head += k[j - 1];
    if (head > 0) {
      ++k[j];
      for (size_t l = 0; l < j; ++l) k[l] = 0;
      k[0] = head - 1;
      return true;
    }
  }
  return false;
}

Composition RepeatedStateExpansion::composition(std::size_t t) const {
  const auto begin = counts_.begin() + static_cast<std::ptrdiff_t>(t * static_cast<size_t>(base_dim_));
  return Composition(begin, begin + base_dim_);
}

Complex RepeatedStateExpansion::coefficient(std::size_t t) const {
  return std::polar(std::exp(log_magnitude_[t]), phase_[t]);
}

std::size_t RepeatedStateExpansion::find(const Composition& k) const {
  if (k.size() != static_cast<size_t>(base_dim_)) return size();
  for (size_t t = 0; t < size(); ++t)
    if (std::equal(k.begin(), k.end(), counts_.begin() + static_cast<std::ptrdiff_t>(t * k.size()))) return t;
  return size();
}

RepeatedStateExpansion expand(const StateVector& c, int n, std::uint64_t max_terms) {
  const int dim = static_cast<int>(c.size());
  check_terms(n, dim, max_terms, "expand");
  const std::vector<double> log_fact = log_factorials(n);
  std::vector<double> log_abs(static_cast<size_t>(dim)), arg(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    log_abs[static_cast<size_t>(i)] = std::log(std::abs(c(i)));
    arg[static_cast<size_t>(i)] = std::arg(c(i));
  }
  RepeatedStateExpansion out;
  out.n_ = n;
  out.base_dim_ = dim;
  const auto terms = static_cast<size_t>(composition_count(n, dim));
  out.counts_.reserve(terms * static_cast<size_t>(dim));
  out.log_magnitude_.reserve(terms);
  out.phase_.reserve(terms);
  Composition k = first_composition(n, dim);
  do {
    double log_mag = 0.5 * log_fact[static_cast<size_t>(n)];
    double phase = 0.0;
    for (int i = 0; i < dim; ++i) {
      const int ki = k[static_cast<size_t>(i)];
      if (ki == 0) continue;
      log_mag += ki * log_abs[static_cast<size_t>(i)] - 0.5 * log_fact[static_cast<size_t>(ki)];
      phase += ki * arg[static_cast<size_t>(i)];
    }
    out.counts_.insert(out.counts_.end(), k.begin(), k.end());
    out.log_magnitude_.push_back(log_mag);
    out.phase_.push_back(std::remainder(phase, 2.0 * std::numbers::pi));
  } while (next_composition(k));
  return out;
}

RepeatedStateExpansion rate_apply(const RepeatedStateExpansion& e, int i) {
  if (i < 0 || i >= e.base_dim()) throw std::invalid_argument("rate_apply: basis index out of range");
  RepeatedStateExpansion out = e;
  for (size_t t = 0; t < out.size(); ++t) {
    const int ki = e.count(t, i);
    out.log_magnitude_[t] = ki == 0 ? -std::numeric_limits<double>::infinity()
                                    : out.log_magnitude_[t] + std::log(static_cast<double>(ki) / e.n());
  }
  return out;
}

AverageCheck average_check(const KreinOperator& a, const StateVector& psi, int n, std::uint64_t max_terms,
                           const ClassifyOptions& options) {
  if (psi.size() != a.dimension()) throw std::invalid_argument("average_check: dimension mismatch");
  const int dim = static_cast<int>(a.dimension());
  if (dim == 1) throw std::invalid_argument("average_check: need at least two basis states");
  check_terms(n, dim, max_terms, "average_check");
  const SpectralClassification spectrum = classify_spectrum(a, options);
  if (spectrum.has_null_pairs())
    throw std::invalid_argument("average_check: operator has null eigenvectors");

  std::vector<int> signs;
  StateVector c(dim);
  std::vector<double> eig;
  for (int j = 0; j < dim; ++j) {
    const auto& e = spectrum.entries[static_cast<size_t>(j)];
    const int sign = e.norm_class == NormClass::Positive ? 1 : -1;
    signs.push_back(sign);
    c(j) = static_cast<double>(sign) * inner_product(a.metric(), e.vector, psi);
    eig.push_back(e.eigenvalue.real());
  }
  const std::vector<double> x = signed_weights(signs, c, "average_check");
  const mpfr_prec_t prec = precision_for(x, n, composition_count(n, dim)) + 64;

  std::vector<BigFloat> eig_big;
  for (double v : eig) eig_big.emplace_back(prec, v);
  BigFloat scratch(prec);
  auto mean_eigenvalue = [&](const Composition& k, BigFloat& out) {
    out.set(0.0);
    for (size_t j = 0; j < k.size(); ++j) {
      if (k[j] == 0) continue;
      scratch.set(eig_big[j]);
      scratch *= static_cast<long>(k[j]);
      out += scratch;
    }
    out /= static_cast<long>(n);
    return true;
  };
  const BigFloat den = composition_sum(x, n, prec, NoFactor{});
  const BigFloat num = composition_sum(x, n, prec, mean_eigenvalue);

  AverageCheck out;
  out.lhs = detail::ratio(num, den).to_double();
  out.rhs = inner_product(a.metric(), psi, a.matrix() * psi) / inner_product(a.metric(), psi, psi);
  return out;
}

double repeated_norm(const std::vector<int>& metric_signs, const StateVector& c, int n, std::uint64_t max_terms) {
  check_terms(n, static_cast<int>(c.size()), max_terms, "repeated_norm");
  const std::vector<double> x = signed_weights(metric_signs, c, "repeated_norm");
  const mpfr_prec_t prec = precision_for(x, n, composition_count(n, static_cast<int>(c.size())));
  BigFloat sum = composition_sum(x, n, prec, NoFactor{});
  BigFloat fact(prec);
  fact.set_factorial(static_cast<unsigned long>(n));
  sum *= fact;
  return sum.to_double();
}

double norm_moment(const std::vector<int>& metric_signs, const StateVector& c, int i, int m, int n,
                   std::uint64_t max_terms) {
  const int dim = static_cast<int>(c.size());
  check_terms(n, dim, max_terms, "norm_moment");
  if (i < 0 || i >= dim) throw std::invalid_argument("norm_moment: index out of range");
  if (m < 0) throw std::invalid_argument("norm_moment: moment order must be non-negative");
  const std::vector<double> x = signed_weights(metric_signs, c, "norm_moment");
  const mpfr_prec_t prec = precision_for(x, n, composition_count(n, dim)) + 64;

  // (k/n)^m for every possible occupation k.
  std::vector<BigFloat> rate_power;
  for (int k = 0; k <= n; ++k) {
    BigFloat r(prec, static_cast<double>(k));
    r /= static_cast<long>(n);
    BigFloat pw(prec, 1.0);
    for (int j = 0; j < m; ++j) pw *= r;
    rate_power.push_back(std::move(pw));
  }
  auto factor = [&](const Composition& k, BigFloat& out) {
    out.set(rate_power[static_cast<size_t>(k[static_cast<size_t>(i)])]);
    return true;
  };
  const BigFloat den = composition_sum(x, n, prec, NoFactor{});
  const BigFloat num = composition_sum(x, n, prec, factor);
  return detail::ratio(num, den).to_double();
}

ConvergenceReport coefficient_convergence(const StateVector& c, int i, int n, std::uint64_t max_terms) {
  if (i < 0 || i >= c.size()) throw std::invalid_argument("coefficient_convergence: index out of range");
  const double p = probabilities(c)[static_cast<size_t>(i)];
  const RepeatedStateExpansion e = expand(c, n, max_terms);

  double log_peak = -std::numeric_limits<double>::infinity();
  size_t peak = 0;
  for (size_t t = 0; t < e.size(); ++t) {
    const double l = e.log_magnitude(t);
    const double tie = 1e-12 * std::max(1.0, std::abs(l));
    if (l > log_peak + tie) {
      log_peak = l;
      peak = t;
    } else if (std::abs(l - log_peak) <= tie) {
      const Composition a = e.composition(t), b = e.composition(peak);
      if (std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) peak = t;
      log_peak = std::max(log_peak, l);
    }
  }

  double num = 0.0, den = 0.0;
  for (size_t t = 0; t < e.size(); ++t) {
    const double mag = std::exp(e.log_magnitude(t) - log_peak);
    const double rate = static_cast<double>(e.count(t, i)) / n;
    num = std::max(num, std::abs(p - rate) * mag);
    den = std::max(den, rate * mag);
  }

  ConvergenceReport out;
  out.n = n;
  out.target_index = i;
  out.projective_residual = den > 0.0 ? num / den : 0.0;
  out.peak_location = e.composition(peak);
  const double peak_rate = static_cast<double>(out.peak_location[static_cast<size_t>(i)]) / n;
  out.peak_value_ratio = p > 0.0 ? peak_rate / p : (peak_rate == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return out;
}

GaussianSummary gaussian_summary(const StateVector& c, int n, std::uint64_t max_terms) {
  const std::vector<double> p = probabilities(c);
  const Index dim = c.size();
  GaussianSummary out;
  out.mu = Eigen::VectorXd(dim);
  out.sigma2 = Eigen::MatrixXd(dim, dim);
  for (Index a = 0; a < dim; ++a) {
    out.mu(a) = n * p[static_cast<size_t>(a)];
    for (Index b = 0; b < dim; ++b)
      out.sigma2(a, b) = n * ((a == b ? p[static_cast<size_t>(a)] : 0.0) - p[static_cast<size_t>(a)] * p[static_cast<size_t>(b)]);
  }

  const RepeatedStateExpansion e = expand(c, n, max_terms);
  double log_peak = -std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < e.size(); ++t) log_peak = std::max(log_peak, e.log_magnitude(t));
  double total = 0.0;
  Eigen::VectorXd first = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd k(dim);
  for (size_t t = 0; t < e.size(); ++t) {
    const double w = std::exp(2.0 * (e.log_magnitude(t) - log_peak));
    if (w == 0.0) continue;
    for (Index a = 0; a < dim; ++a) k(a) = e.count(t, static_cast<int>(a));
    total += w;
    first += w * k;
    second += w * k * k.transpose();
  }
  out.empirical_mu = first / total;
  out.empirical_sigma2 = second / total - out.empirical_mu * out.empirical_mu.transpose();
  return out;
}

ProductMoment product_operator_moment(const std::vector<double>& a_eigs, const StateVector& c, int n,
                                      std::uint64_t max_terms) {
  const int dim = static_cast<int>(c.size());
  if (a_eigs.size() != static_cast<size_t>(dim))
    throw std::invalid_argument("product_operator_moment: a_eigs and c differ in length");
  check_terms(n, dim, max_terms, "product_operator_moment");
  const std::vector<double> p = probabilities(c);
  const auto terms = composition_count(n, dim);

  double abs_sum = 0.0, sum = 0.0;
  for (int j = 0; j < dim; ++j) {
    abs_sum += std::abs(p[static_cast<size_t>(j)] * a_eigs[static_cast<size_t>(j)]);
    sum += p[static_cast<size_t>(j)] * a_eigs[static_cast<size_t>(j)];
  }
  // An exact zero mean needs every term exact: p^k and a^k carry at most 53k
  // significant bits each.
  const mpfr_prec_t prec = sum == 0.0 ? static_cast<mpfr_prec_t>(128 + 106L * n * dim)
                                      : detail::cancellation_precision(abs_sum, sum, n, static_cast<double>(terms));

  std::vector<std::vector<BigFloat>> powers(static_cast<size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    BigFloat aj(prec, a_eigs[static_cast<size_t>(j)]);
    powers[static_cast<size_t>(j)].emplace_back(prec, 1.0);
    for (int k = 1; k <= 2 * n; ++k) {
      BigFloat next(powers[static_cast<size_t>(j)].back());
      next *= aj;
      powers[static_cast<size_t>(j)].push_back(std::move(next));
    }
  }
  auto eigen_factor = [&](int power) {
    return [&, power](const Composition& k, BigFloat& out) {
      out.set(1.0);
      for (size_t j = 0; j < k.size(); ++j) out *= powers[j][static_cast<size_t>(power * k[j])];
      return true;
    };
  };
  const BigFloat norm = composition_sum(p, n, prec, NoFactor{});
  const BigFloat first = detail::ratio(composition_sum(p, n, prec, eigen_factor(1)), norm);
  BigFloat var = detail::ratio(composition_sum(p, n, prec, eigen_factor(2)), norm);
  BigFloat sq(first);
  sq *= first;
  var -= sq;
  return {first.to_double(), var.to_double()};
}

SparseMatrix tensor_average(const Matrix& a, int n) {
  if (a.rows() != a.cols()) throw std::invalid_argument("tensor_average: matrix is not square");
  if (n < 1) throw std::invalid_argument("tensor_average: n must be at least 1");
  const Index d = a.rows();
  double total = 1.0;
  for (int j = 0; j < n; ++j) total *= static_cast<double>(d);
  if (total > 4096.0) throw std::invalid_argument("tensor_average: dim^n exceeds 4096");
  const SparseMatrix as = a.sparseView(0.0, 0.0);
  const auto dim_pow = [d](int p) {
    Index out = 1;
    for (int j = 0; j < p; ++j) out *= d;
    return out;
  };
  SparseMatrix out(dim_pow(n), dim_pow(n));
  for (int j = 0; j < n; ++j) {
    SparseMatrix left(dim_pow(j), dim_pow(j)), right(dim_pow(n - j - 1), dim_pow(n - j - 1));
    left.setIdentity();
    right.setIdentity();
    const SparseMatrix inner = Eigen::kroneckerProduct(as, right);
    out += SparseMatrix(Eigen::kroneckerProduct(left, inner));
  }
  out /= static_cast<double>(n);
  return out;
}

double commutator_scaling_check(const KreinOperator& a, const KreinOperator& b, int n) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("commutator_scaling_check: dimension mismatch");
  const SparseMatrix an = tensor_average(a.matrix(), n);
  const SparseMatrix bn = tensor_average(b.matrix(), n);
  const Matrix comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  const SparseMatrix lhs = SparseMatrix(an * bn) - SparseMatrix(bn * an);
  const SparseMatrix rhs = tensor_average(comm, n) / static_cast<double>(n);
  return max_abs(SparseMatrix(lhs - rhs));
}

}  // namespace krein
