#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>

namespace nlg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Kronecker product. Row index of the result is i_a * rows(b) + i_b.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
    -> Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m) -> typename Derived::PlainObject {
  return (m + m.adjoint()) / typename Derived::Scalar(2);
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Eigenvalues (ascending) of the Hermitian part of `m`.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// Principal square root of a PSD matrix; negative eigenvalues are clamped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

ComplexMatrix random_unitary(int dim, std::mt19937_64& rng);
ComplexVector random_unit_vector(int dim, std::mt19937_64& rng);
/// Ginibre-ensemble density matrix of the given rank (full rank when rank <= 0).
ComplexMatrix random_density(int dim, std::mt19937_64& rng, int rank = 0);

}  // namespace nlg
