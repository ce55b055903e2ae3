#include "nlg/quantum.hpp"

#include "nlg/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace nlg {

namespace {

constexpr double kClamp = 1e-12;    // eigenvalues treated as zero in entropies
constexpr double kSupport = 1e-10;  // support detection threshold

double log2_safe(double x) { return std::log2(x); }

void require_same_dim(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidationError("dimension mismatch");
}

struct SupportSplit {
  Eigen::VectorXd eigenvalues;  // on support
  ComplexMatrix vectors;        // columns spanning the support
  double outside_weight = 0.0;  // Tr(rho P_kernel)
};

// Spectral split of sigma into support / kernel, with rho's weight on the kernel.
SupportSplit split_support(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sigma.matrix());
  const auto& q = es.eigenvalues();
  const auto& v = es.eigenvectors();
  SupportSplit out;
  std::vector<int> keep;
  for (int k = 0; k < q.size(); ++k) {
    if (q(k) > kSupport) {
      keep.push_back(k);
    } else {
      out.outside_weight += (v.col(k).adjoint() * rho.matrix() * v.col(k))(0, 0).real();
    }
  }
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  out.vectors.resize(sigma.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.eigenvalues(static_cast<Eigen::Index>(i)) = q(keep[i]);
    out.vectors.col(static_cast<Eigen::Index>(i)) = v.col(keep[i]);
  }
  return out;
}

int flat_label(std::span<const int> sizes, std::span<const int> label) {
  int idx = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) idx = idx * sizes[i] + label[i];
  return idx;
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw ValidationError("density matrix must be square and non-empty");
  if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if (!is_hermitian(m, kTolerance)) throw ValidationError("density matrix not Hermitian");
  ComplexMatrix h = hermitian_part(m);
  if (std::abs(h.trace().real() - 1.0) > kTolerance) throw ValidationError("density matrix trace != 1");
  if (hermitian_eigenvalues(h).minCoeff() < -kTolerance) throw ValidationError("density matrix not positive semidefinite");
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  if (std::abs(psi.squaredNorm() - 1.0) > kTolerance) throw ValidationError("state vector not normalized");
  return DensityMatrix(hermitian_part(ComplexMatrix(psi * psi.adjoint())));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw ValidationError("dimension must be positive");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis_projector(int dim, int index) {
  if (index < 0 || index >= dim) throw ValidationError("basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

bool DensityMatrix::is_pure(double tol) const {
  return std::abs(hermitian_eigenvalues(m_).maxCoeff() - 1.0) <= tol;
}

BipartitePureState BipartitePureState::make(int dim_a, int dim_b, ComplexVector amplitudes) {
  if (dim_a < 1 || dim_b < 1) throw ValidationError("dimensions must be positive");
  if (amplitudes.size() != static_cast<Eigen::Index>(dim_a) * dim_b) throw ValidationError("amplitude length != dim_a * dim_b");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > DensityMatrix::kTolerance) throw ValidationError("state vector not normalized");
  return BipartitePureState{dim_a, dim_b, std::move(amplitudes)};
}

BipartitePureState BipartitePureState::epr() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return make(2, 2, v);
}

CqState CqState::make(std::vector<int> register_sizes, std::vector<std::vector<int>> labels,
                      std::vector<double> weights, std::vector<DensityMatrix> states) {
  if (labels.empty() || labels.size() != weights.size() || labels.size() != states.size())
    throw ValidationError("cq-state: labels, weights and states must have equal non-zero length");
  for (int s : register_sizes)
    if (s < 1) throw ValidationError("cq-state: register sizes must be positive");
  std::vector<char> seen(static_cast<std::size_t>(
      std::accumulate(register_sizes.begin(), register_sizes.end(), 1, std::multiplies<>())), 0);
  for (const auto& l : labels) {
    if (l.size() != register_sizes.size()) throw ValidationError("cq-state: label arity mismatch");
    for (std::size_t i = 0; i < l.size(); ++i)
      if (l[i] < 0 || l[i] >= register_sizes[i]) throw ValidationError("cq-state: label out of range");
    auto& s = seen[static_cast<std::size_t>(flat_label(register_sizes, l))];
    if (s) throw ValidationError("cq-state: duplicate label");
    s = 1;
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("cq-state: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("cq-state: weights do not sum to 1");
  for (const auto& s : states)
    if (s.dim() != states.front().dim()) throw ValidationError("cq-state: conditional states differ in dimension");
  return CqState{std::move(register_sizes), std::move(labels), std::move(weights), std::move(states)};
}

int CqState::classical_dim() const {
  return std::accumulate(register_sizes.begin(), register_sizes.end(), 1, std::multiplies<>());
}

DensityMatrix CqState::embed() const {
  const int d = quantum_dim();
  ComplexMatrix m = ComplexMatrix::Zero(classical_dim() * d, classical_dim() * d);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const int idx = flat_label(register_sizes, labels[k]);
    m.block(idx * d, idx * d, d, d) = weights[k] * states[k].matrix();
  }
  return DensityMatrix::from_matrix(m);
}

DensityMatrix CqState::quantum_marginal() const {
  ComplexMatrix m = ComplexMatrix::Zero(quantum_dim(), quantum_dim());
  for (std::size_t k = 0; k < labels.size(); ++k) m += weights[k] * states[k].matrix();
  return DensityMatrix::from_matrix(m);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_matrix(kron(a.matrix(), b.matrix()));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_a, int dim_b, Subsystem traced) {
  if (dim_a < 1 || dim_b < 1 || m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b || m.cols() != m.rows())
    throw ValidationError("partial trace: inconsistent dimensions");
  if (traced == Subsystem::b) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i) out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Subsystem traced) {
  return DensityMatrix::from_matrix(partial_trace(rho.matrix(), dim_a, dim_b, traced));
}

double binary_entropy(double p) {
  const double probs[2] = {p, 1.0 - p};
  return shannon_entropy(probs);
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > kClamp) h -= x * log2_safe(x);
  return h;
}

double spectral_entropy(const Eigen::VectorXd& eigenvalues) {
  return shannon_entropy(std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())));
}

double von_neumann_entropy(const DensityMatrix& rho) { return spectral_entropy(hermitian_eigenvalues(rho.matrix())); }

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma);
  const SupportSplit split = split_support(rho, sigma);
  if (split.outside_weight > kSupport) return std::numeric_limits<double>::infinity();
  double cross = 0.0;  // Tr(rho log sigma) on supp(sigma)
  for (Eigen::Index k = 0; k < split.eigenvalues.size(); ++k) {
    const double w = (split.vectors.col(k).adjoint() * rho.matrix() * split.vectors.col(k))(0, 0).real();
    cross += w * log2_safe(split.eigenvalues(k));
  }
  const double d = -von_neumann_entropy(rho) - cross;
  return std::max(d, 0.0);
}

double relative_min_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma);
  const SupportSplit split = split_support(rho, sigma);
  if (split.outside_weight > kSupport) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd inv_sqrt = split.eigenvalues.cwiseSqrt().cwiseInverse();
  const ComplexMatrix w = inv_sqrt.cast<Complex>().asDiagonal() *
                          (split.vectors.adjoint() * rho.matrix() * split.vectors) *
                          inv_sqrt.cast<Complex>().asDiagonal();
  const double top = hermitian_eigenvalues(w).maxCoeff();
  return std::max(log2_safe(top), 0.0);
}

double mutual_information(const DensityMatrix& rho, int dim_a, int dim_b) {
  const DensityMatrix ra = partial_trace(rho, dim_a, dim_b, Subsystem::b);
  const DensityMatrix rb = partial_trace(rho, dim_a, dim_b, Subsystem::a);
  return relative_entropy(rho, tensor(ra, rb));
}

double entanglement_entropy(const BipartitePureState& psi, Subsystem kept) {
  const ComplexMatrix full = psi.amplitudes * psi.amplitudes.adjoint();
  const Subsystem traced = kept == Subsystem::b ? Subsystem::a : Subsystem::b;
  return spectral_entropy(hermitian_eigenvalues(partial_trace(full, psi.dim_a, psi.dim_b, traced)));
}

double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw ValidationError("concurrence requires a 2x2 (dim 4) state");
  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
  flip(0, 3) = flip(3, 0) = -1.0;
  flip(1, 2) = flip(2, 1) = 1.0;
  // The lambdas are the singular values of sqrt(rho) * flip * conj(sqrt(rho)).
  // Taking them directly avoids square roots of near-zero eigenvalues.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  Eigen::VectorXd roots = es.eigenvalues();
  for (Eigen::Index i = 0; i < roots.size(); ++i) roots(i) = roots(i) < 1e-12 ? 0.0 : std::sqrt(roots(i));
  const ComplexMatrix root = es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::JacobiSVD<ComplexMatrix> svd(root * flip * root.conjugate());
  Eigen::VectorXd lambda = svd.singularValues();
  std::sort(lambda.data(), lambda.data() + lambda.size(), std::greater<>());
  return std::max(0.0, lambda(0) - lambda(1) - lambda(2) - lambda(3));
}

double eof_two_qubit(const DensityMatrix& rho) {
  const double c = std::min(1.0, concurrence(rho));
  return binary_entropy((1.0 + std::sqrt(1.0 - c * c)) / 2.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma);
  return std::min(1.0, hermitian_eigenvalues(rho.matrix() - sigma.matrix()).cwiseAbs().sum() / 2.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma);
  const ComplexMatrix root = psd_sqrt(rho.matrix());
  const double f = hermitian_eigenvalues(root * sigma.matrix() * root).cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f * f, 0.0, 1.0);
}

double cq_mutual_information(const CqState& rho, int register_index) {
  if (register_index < 0 || register_index >= static_cast<int>(rho.register_sizes.size()))
    throw ValidationError("register index out of range");
  const int d = rho.quantum_dim();
  const int size = rho.register_sizes[static_cast<std::size_t>(register_index)];
  std::vector<double> p(static_cast<std::size_t>(size), 0.0);
  std::vector<ComplexMatrix> block(static_cast<std::size_t>(size), ComplexMatrix::Zero(d, d));
  for (std::size_t k = 0; k < rho.labels.size(); ++k) {
    const auto x = static_cast<std::size_t>(rho.labels[k][static_cast<std::size_t>(register_index)]);
    p[x] += rho.weights[k];
    block[x] += rho.weights[k] * rho.states[k].matrix();
  }
  double conditional = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x)
    if (p[x] > kClamp) conditional += p[x] * spectral_entropy(hermitian_eigenvalues(block[x] / p[x]));
  return std::max(0.0, von_neumann_entropy(rho.quantum_marginal()) - conditional);
}

RazAudit quantum_raz_audit(const CqState& rho, const CqState& sigma) {
  if (rho.register_sizes != sigma.register_sizes || rho.quantum_dim() != sigma.quantum_dim())
    throw ValidationError("raz audit: rho and sigma have different register layouts");
  const auto& sizes = sigma.register_sizes;
  const int total = sigma.classical_dim();

  std::vector<double> dense(static_cast<std::size_t>(total), 0.0);
  for (std::size_t k = 0; k < sigma.labels.size(); ++k)
    dense[static_cast<std::size_t>(flat_label(sizes, sigma.labels[k]))] = sigma.weights[k];
  std::vector<std::vector<double>> marginals;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::vector<double> q(static_cast<std::size_t>(sizes[i]), 0.0);
    for (std::size_t k = 0; k < sigma.labels.size(); ++k) q[static_cast<std::size_t>(sigma.labels[k][i])] += sigma.weights[k];
    marginals.push_back(std::move(q));
  }
  std::vector<int> label(sizes.size(), 0);
  for (int flat = 0; flat < total; ++flat) {
    int rest = flat;
    double prod = 1.0;
    for (std::size_t i = sizes.size(); i-- > 0;) {
      label[i] = rest % sizes[i];
      rest /= sizes[i];
      prod *= marginals[i][static_cast<std::size_t>(label[i])];
    }
    if (std::abs(prod - dense[static_cast<std::size_t>(flat)]) > 1e-10)
      throw ValidationError("raz audit: sigma is not a product over classical registers");
  }
  for (const auto& s : sigma.states)
    if ((s.matrix() - sigma.states.front().matrix()).cwiseAbs().maxCoeff() > 1e-10)
      throw ValidationError("raz audit: sigma is not a product with its quantum register");

  RazAudit out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out.lhs += cq_mutual_information(rho, static_cast<int>(i));
  out.rhs = relative_entropy(rho.embed(), sigma.embed());
  return out;
}

}  // namespace nlg
