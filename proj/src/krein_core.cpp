#include "krein/krein_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace krein {
namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

double scale_of(Complex z) { return std::max(1.0, std::abs(z)); }

// Fix the global phase so that the largest component is real and positive.
void canonical_phase(Vector& v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const Complex c = v(arg);
  if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

// Union-find clustering of eigenvalues closer than tol * max(1, |lambda|).
std::vector<std::vector<Index>> degenerate_blocks(const Vector& values, double tol) {
  const Index n = values.size();
  std::vector<Index> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[static_cast<size_t>(i)] != i) i = parent[static_cast<size_t>(i)] = parent[static_cast<size_t>(parent[static_cast<size_t>(i)])];
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(values(i) - values(j)) <= tol * std::max(scale_of(values(i)), scale_of(values(j))))
        parent[static_cast<size_t>(find(j))] = find(i);
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (slot[static_cast<size_t>(r)] < 0) {
      slot[static_cast<size_t>(r)] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<size_t>(slot[static_cast<size_t>(r)])].push_back(i);
  }
  return blocks;
}

void pair_null_entries(std::vector<SpectralEntry>& entries, const ClassifyOptions& options) {
  std::vector<size_t> nulls;
  for (size_t i = 0; i < entries.size(); ++i)
    if (entries[i].norm_class == NormClass::Null) nulls.push_back(i);
  std::sort(nulls.begin(), nulls.end(), [&](size_t a, size_t b) {
    const Complex x = entries[a].eigenvalue, y = entries[b].eigenvalue;
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  int next_id = 0;
  for (size_t a : nulls) {
    if (entries[a].pair_id >= 0) continue;
    const Complex la = entries[a].eigenvalue;
    double best = std::numeric_limits<double>::infinity();
    size_t best_b = entries.size();
    for (size_t b : nulls) {
      if (b == a || entries[b].pair_id >= 0) continue;
      const Complex lb = entries[b].eigenvalue;
      const double d = std::hypot(la.real() - lb.real(), std::abs(la.imag()) - std::abs(lb.imag()));
      if (d < best) {
        best = d;
        best_b = b;
      }
    }
    if (best_b == entries.size())
      throw NumericalFailure("classify_spectrum: unpaired null eigenvector at eigenvalue (" +
                             std::to_string(la.real()) + ", " + std::to_string(la.imag()) + ")");
    const Complex lb = entries[best_b].eigenvalue;
    if (std::abs(la - std::conj(lb)) > options.pair_tol * std::max(scale_of(la), scale_of(lb)))
      throw NumericalFailure("classify_spectrum: null eigenvectors without a conjugate partner near (" +
                             std::to_string(la.real()) + ", " + std::to_string(la.imag()) + ")");
    entries[a].pair_id = entries[best_b].pair_id = next_id++;
  }
}

void sort_entries(std::vector<SpectralEntry>& entries) {
  std::vector<double> key(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) key[i] = entries[i].eigenvalue.real();
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].pair_id < 0) continue;
    for (size_t j = 0; j < entries.size(); ++j)
      if (j != i && entries[j].pair_id == entries[i].pair_id)
        key[i] = std::min(entries[i].eigenvalue.real(), entries[j].eigenvalue.real());
  }
  std::vector<size_t> order(entries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return entries[a].eigenvalue.imag() < entries[b].eigenvalue.imag();
  });
  std::vector<SpectralEntry> sorted;
  sorted.reserve(entries.size());
  for (size_t i : order) sorted.push_back(std::move(entries[i]));
  // Renumber pairs in order of appearance.
  std::vector<int> remap;
  for (auto& e : sorted) {
    if (e.pair_id < 0) continue;
    auto id = static_cast<size_t>(e.pair_id);
    if (remap.size() <= id) remap.resize(id + 1, -1);
    if (remap[id] < 0) remap[id] = static_cast<int>(std::count_if(remap.begin(), remap.end(), [](int r) { return r >= 0; }));
    e.pair_id = remap[id];
  }
  entries = std::move(sorted);
}

void require_self_adjoint(const KreinOperator& a, const ClassifyOptions& options, const char* who) {
  const double defect = self_adjoint_defect(a);
  if (defect > options.self_adjoint_tol)
    throw std::invalid_argument(std::string(who) + ": operator is not Krein-self-adjoint (defect " +
                                std::to_string(defect) + ")");
}

// Sums weights of entries sharing one eigenvalue (within degeneracy_tol).
std::vector<Outcome> merge_outcomes(const std::vector<Outcome>& raw, double tol) {
  Vector values(static_cast<Index>(raw.size()));
  for (size_t i = 0; i < raw.size(); ++i) values(static_cast<Index>(i)) = raw[i].eigenvalue;
  std::vector<Outcome> out;
  for (const auto& block : degenerate_blocks(values, tol)) {
    Outcome o{raw[static_cast<size_t>(block.front())].eigenvalue, 0.0};
    for (Index i : block) o.weight += raw[static_cast<size_t>(i)].weight;
    out.push_back(o);
  }
  return out;
}

}  // namespace

KreinOperator::KreinOperator(Matrix matrix, IndefiniteMetric metric)
    : matrix_(std::move(matrix)), metric_(std::move(metric)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("KreinOperator: matrix is not square");
  if (matrix_.rows() != metric_.dimension())
    throw std::invalid_argument("KreinOperator: matrix and metric dimensions differ");
}

SparseKreinOperator::SparseKreinOperator(SparseMatrix matrix, IndefiniteMetric metric)
    : matrix_(std::move(matrix)), metric_(std::move(metric)) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("SparseKreinOperator: matrix is not square");
  if (matrix_.rows() != metric_.dimension())
    throw std::invalid_argument("SparseKreinOperator: matrix and metric dimensions differ");
  matrix_.makeCompressed();
}

KreinOperator krein_adjoint(const KreinOperator& a) {
  return KreinOperator(krein_adjoint(a.metric(), a.matrix()), a.metric());
}

double self_adjoint_defect(const KreinOperator& a) {
  const double scale = max_abs(a.matrix());
  if (scale == 0.0) return 0.0;
  return max_abs(Matrix(krein_adjoint(a.metric(), a.matrix()) - a.matrix())) / scale;
}

double self_adjoint_defect(const SparseKreinOperator& a) {
  const double scale = max_abs(a.matrix());
  if (scale == 0.0) return 0.0;
  const SparseMatrix& eta = a.metric().matrix();
  const SparseMatrix adj = eta * SparseMatrix(a.matrix().adjoint()) * eta;
  return max_abs(SparseMatrix(adj - a.matrix())) / scale;
}

bool is_self_adjoint(const KreinOperator& a, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_self_adjoint: tol must be positive");
  return self_adjoint_defect(a) <= tol;
}

bool is_self_adjoint(const SparseKreinOperator& a, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_self_adjoint: tol must be positive");
  return self_adjoint_defect(a) <= tol;
}

int SpectralClassification::null_pair_count() const {
  int pairs = 0;
  for (const auto& e : entries) pairs = std::max(pairs, e.pair_id + 1);
  return pairs;
}

std::vector<Complex> SpectralClassification::eigenvalues() const {
  std::vector<Complex> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.eigenvalue);
  return out;
}

SpectralClassification classify_eigenpairs(const Vector& values, const Matrix& vectors,
                                           const IndefiniteMetric& metric, const ClassifyOptions& options) {
  if (vectors.cols() != values.size() || vectors.rows() != metric.dimension())
    throw std::invalid_argument("classify_eigenpairs: shape mismatch");
  SpectralClassification out;
  for (const auto& block : degenerate_blocks(values, options.degeneracy_tol)) {
    Matrix basis(vectors.rows(), static_cast<Index>(block.size()));
    for (size_t j = 0; j < block.size(); ++j) basis.col(static_cast<Index>(j)) = vectors.col(block[j]);
    Matrix span = basis;
    Vector gram_values;
    if (block.size() > 1) {
      // Orthonormalize the eigenspace and diagonalize its Gram matrix so the
      // returned basis is eta-orthogonal within the block.
      Eigen::ColPivHouseholderQR<Matrix> qr(basis);
      qr.setThreshold(1e-10);
      if (qr.rank() < basis.cols())
        throw NumericalFailure("classify_spectrum: defective eigenvalue, eigenvectors do not span the block");
      Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
      Matrix gram = q.adjoint() * metric.apply(q);
      gram = (0.5 * (gram + gram.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
      span = q * es.eigenvectors();
    }
    for (size_t j = 0; j < block.size(); ++j) {
      SpectralEntry e;
      e.eigenvalue = values(block[j]);
      Vector v = span.col(static_cast<Index>(j));
      const double euclid = v.squaredNorm();
      if (euclid == 0.0) throw NumericalFailure("classify_spectrum: zero eigenvector");
      const double nrm = indefinite_norm(metric, v);
      e.relative_norm = nrm / euclid;
      if (std::abs(e.relative_norm) < options.null_tol) {
        e.norm_class = NormClass::Null;
        v /= std::sqrt(euclid);
      } else {
        e.norm_class = nrm > 0 ? NormClass::Positive : NormClass::Negative;
        v /= std::sqrt(std::abs(nrm));
        if (std::abs(e.eigenvalue.imag()) < options.null_tol * scale_of(e.eigenvalue))
          e.eigenvalue = Complex(e.eigenvalue.real(), 0.0);
      }
      canonical_phase(v);
      e.vector = std::move(v);
      out.entries.push_back(std::move(e));
    }
  }
  pair_null_entries(out.entries, options);
  sort_entries(out.entries);
  return out;
}

SpectralClassification classify_spectrum(const KreinOperator& a, const ClassifyOptions& options) {
  require_self_adjoint(a, options, "classify_spectrum");
  Eigen::ComplexEigenSolver<Matrix> es(a.matrix(), true);
  if (es.info() != Eigen::Success) throw NumericalFailure("classify_spectrum: eigensolver failed");
  return classify_eigenpairs(es.eigenvalues(), es.eigenvectors(), a.metric(), options);
}

Matrix ghost_from_spectrum(const SpectralClassification& spectrum, const IndefiniteMetric& metric) {
  const Index n = metric.dimension();
  Matrix v(n, static_cast<Index>(spectrum.entries.size()));
  for (size_t j = 0; j < spectrum.entries.size(); ++j) {
    if (spectrum.entries[j].norm_class == NormClass::Null)
      throw std::invalid_argument("ghost_from_spectrum: spectrum contains null eigenvectors");
    v.col(static_cast<Index>(j)) = spectrum.entries[j].vector;
  }
  return Matrix(v * v.adjoint()) * metric.matrix();
}

GhostResolution ghost_resolution(const KreinOperator& a, const ClassifyOptions& options) {
  GhostResolution out;
  out.spectrum = classify_spectrum(a, options);
  if (out.spectrum.has_null_pairs()) {
    out.kind = GhostResolution::Kind::NoSolution;
    return out;
  }
  const auto& entries = out.spectrum.entries;
  Vector values(static_cast<Index>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) values(static_cast<Index>(i)) = entries[i].eigenvalue;
  int free_parameters = 0;
  for (const auto& block : degenerate_blocks(values, options.degeneracy_tol)) {
    int plus = 0, minus = 0;
    for (Index i : block) (entries[static_cast<size_t>(i)].norm_class == NormClass::Positive ? plus : minus)++;
    free_parameters += plus * minus;
  }
  out.kind = free_parameters > 0 ? GhostResolution::Kind::Family : GhostResolution::Kind::Unique;
  out.free_parameters = free_parameters;
  out.ghost.emplace(ghost_from_spectrum(out.spectrum, a.metric()), a.metric());
  return out;
}

std::vector<Outcome> observable_probabilities(const KreinOperator& a, const StateVector& psi,
                                              const ClassifyOptions& options) {
  if (psi.size() != a.dimension()) throw std::invalid_argument("observable_probabilities: dimension mismatch");
  const GhostResolution res = ghost_resolution(a, options);
  if (res.kind == GhostResolution::Kind::NoSolution)
    throw std::invalid_argument("observable_probabilities: observable has null eigenvectors, no ghost operator");
  if (res.kind == GhostResolution::Kind::Family)
    throw std::invalid_argument("observable_probabilities: ghost operator is not unique");
  std::vector<Outcome> raw;
  double total = 0.0;
  for (const auto& e : res.spectrum.entries) {
    const double w = std::norm(inner_product(a.metric(), e.vector, psi));
    raw.push_back({e.eigenvalue, w});
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("observable_probabilities: state has zero A-norm");
  for (auto& o : raw) o.weight /= total;
  return merge_outcomes(raw, options.degeneracy_tol);
}

std::vector<Outcome> indefinite_weights(const KreinOperator& a, const StateVector& psi,
                                        const ClassifyOptions& options) {
  if (psi.size() != a.dimension()) throw std::invalid_argument("indefinite_weights: dimension mismatch");
  const SpectralClassification spectrum = classify_spectrum(a, options);
  if (spectrum.has_null_pairs())
    throw std::invalid_argument("indefinite_weights: eigenbasis touches the null cone");
  std::vector<Outcome> raw;
  double total = 0.0, magnitude = 0.0;
  for (const auto& e : spectrum.entries) {
    const double sign = e.norm_class == NormClass::Positive ? 1.0 : -1.0;
    const double c2 = std::norm(inner_product(a.metric(), e.vector, psi));
    raw.push_back({e.eigenvalue, sign * c2});
    total += sign * c2;
    magnitude += c2;
  }
  if (magnitude == 0.0 || std::abs(total) < options.null_tol * magnitude)
    throw std::invalid_argument("indefinite_weights: state has null indefinite norm");
  for (auto& o : raw) o.weight /= total;
  return merge_outcomes(raw, options.degeneracy_tol);
}

KreinOperator u11_boost(Complex theta) {
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = std::exp(theta);
  b(1, 1) = std::exp(-std::conj(theta));
  return KreinOperator(std::move(b), IndefiniteMetric::reflection(2));
}

Eigen::Matrix2cd null_to_pm_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd t;
  t << r, r, r, -r;
  return t;
}

Matrix evolution_operator(const KreinOperator& h, double t, const ClassifyOptions& options) {
  require_self_adjoint(h, options, "evolve");
  const Index n = h.dimension();
  if (t == 0.0) return Matrix::Identity(n, n);
  bool spectral = true;
  SpectralClassification spectrum;
  try {
    spectrum = classify_spectrum(h, options);
  } catch (const NumericalFailure&) {
    spectral = false;
  }
  if (spectral)
    for (const auto& e : spectrum.entries)
      if (e.norm_class == NormClass::Null || e.eigenvalue.imag() != 0.0) spectral = false;
  if (!spectral) return Matrix((Complex(0.0, -t) * h.matrix()).exp());

  // U = sum_i e^{-i E_i t} N_i |v_i><v_i| eta; exactly pseudo-unitary when
  // the basis is eta-orthonormal.
  Matrix v(n, n), w(n, n);
  for (Index j = 0; j < n; ++j) {
    const auto& e = spectrum.entries[static_cast<size_t>(j)];
    const double sign = e.norm_class == NormClass::Positive ? 1.0 : -1.0;
    v.col(j) = e.vector;
    w.col(j) = e.vector * (sign * std::exp(Complex(0.0, -e.eigenvalue.real() * t)));
  }
  return Matrix(w * v.adjoint()) * h.metric().matrix();
}

StateVector evolve(const KreinOperator& h, double t, const StateVector& psi, const ClassifyOptions& options) {
  if (psi.size() != h.dimension()) throw std::invalid_argument("evolve: dimension mismatch");
  return evolution_operator(h, t, options) * psi;
}

GhostCompatibility ghost_compatibility(const KreinOperator& a, const KreinOperator& h, double tol,
                                       const ClassifyOptions& options) {
  if (a.dimension() != h.dimension()) throw std::invalid_argument("ghost_compatibility: dimension mismatch");
  const GhostResolution ra = ghost_resolution(a, options);
  const GhostResolution rh = ghost_resolution(h, options);
  if (ra.kind != GhostResolution::Kind::Unique || rh.kind != GhostResolution::Kind::Unique)
    throw std::invalid_argument("ghost_compatibility: both operators need a unique ghost");
  GhostCompatibility out;
  const Matrix comm = a.matrix() * h.matrix() - h.matrix() * a.matrix();
  const double scale = std::max(1.0, max_abs(a.matrix()) * max_abs(h.matrix()));
  out.commutator_norm = max_abs(comm) / scale;
  out.commute = out.commutator_norm <= tol;
  out.ghost_distance = max_abs(Matrix(ra.ghost->matrix() - rh.ghost->matrix()));
  out.ghosts_equal = out.ghost_distance <= tol * std::max(1.0, max_abs(ra.ghost->matrix()));
  return out;
}

}  // namespace krein
