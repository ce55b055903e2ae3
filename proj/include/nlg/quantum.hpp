#pragma once

#include "nlg/linalg.hpp"

#include <span>
#include <vector>

namespace nlg {

/// Positive semidefinite, unit-trace matrix. Construction validates and
/// stores the Hermitian part of the input.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  static DensityMatrix from_matrix(const ComplexMatrix& m);
  /// |psi><psi| for a unit vector.
  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix basis_projector(int dim, int index);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  /// Rank one within tolerance (largest eigenvalue equals the trace).
  bool is_pure(double tol = 1e-8) const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Unit vector on C^{dim_a} (x) C^{dim_b}, index i_a * dim_b + i_b.
struct BipartitePureState {
  int dim_a = 0;
  int dim_b = 0;
  ComplexVector amplitudes;

  static BipartitePureState make(int dim_a, int dim_b, ComplexVector amplitudes);
  static BipartitePureState epr();
  DensityMatrix density() const { return DensityMatrix::pure(amplitudes); }
};

/// State classical on registers X_1..X_n and quantum on a register A:
///   sum_x p(x) |x><x| (x) rho_{A|x}.
struct CqState {
  std::vector<int> register_sizes;
  std::vector<std::vector<int>> labels;
  std::vector<double> weights;
  std::vector<DensityMatrix> states;

  static CqState make(std::vector<int> register_sizes, std::vector<std::vector<int>> labels,
                      std::vector<double> weights, std::vector<DensityMatrix> states);

  int quantum_dim() const { return states.front().dim(); }
  int classical_dim() const;
  /// Block-diagonal density matrix on (X_1 ... X_n) (x) A, registers row-major.
  DensityMatrix embed() const;
  /// rho^A = sum_x p(x) rho_{A|x}.
  DensityMatrix quantum_marginal() const;
};

enum class Subsystem { a, b };

inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) { return kron(a, b); }
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Traces out `traced` from an operator on C^{dim_a} (x) C^{dim_b}.
ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_a, int dim_b, Subsystem traced);
DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Subsystem traced);

double binary_entropy(double p);
double shannon_entropy(std::span<const double> p);
/// -sum l log2 l over the spectrum, eigenvalues below 1e-12 dropped.
double spectral_entropy(const Eigen::VectorXd& eigenvalues);

double von_neumann_entropy(const DensityMatrix& rho);
/// D(rho||sigma) in bits; +infinity when supp(rho) is not inside supp(sigma).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
/// D_inf(rho||sigma) = min{ l : rho <= 2^l sigma }; +infinity on support violation.
double relative_min_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
double mutual_information(const DensityMatrix& rho, int dim_a, int dim_b);

/// Entropy of the reduced state on `kept` (B by default).
double entanglement_entropy(const BipartitePureState& psi, Subsystem kept = Subsystem::b);
/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);
/// Entanglement of formation of a two-qubit state, in ebits.
double eof_two_qubit(const DensityMatrix& rho);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Squared Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Holevo quantity I(X_i : A) of a cq-state, register i.
double cq_mutual_information(const CqState& rho, int register_index);

struct RazAudit {
  double lhs = 0.0;  ///< sum_i I(X_i : A)_rho
  double rhs = 0.0;  ///< D(rho || sigma)
};

/// Both sides of sum_i I(X_i:A)_rho <= D(rho||sigma) for sigma a product
/// sigma^{X_1} (x) ... (x) sigma^{X_n} (x) sigma^A.
RazAudit quantum_raz_audit(const CqState& rho, const CqState& sigma);

}  // namespace nlg
