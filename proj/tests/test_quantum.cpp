#include "support.hpp"

#include "nlg/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>

using namespace nlg;
using namespace nlg::testing;

namespace {

DensityMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return DensityMatrix::from_matrix(m);
}

DensityMatrix random_state(int dim, std::mt19937_64& rng, int rank = 0) {
  return DensityMatrix::from_matrix(random_density(dim, rng, rank));
}

}  // namespace

TEST_CASE("density matrix validation") {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix::from_matrix(m), ValidationError);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(m), ValidationError);
  ComplexMatrix h = ComplexMatrix::Identity(2, 2) / 2.0;
  h(0, 1) = Complex(0.0, 0.1);
  CHECK_THROWS_AS(DensityMatrix::from_matrix(h), ValidationError);
  CHECK(DensityMatrix::maximally_mixed(3).matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("tensor of identities and basis projectors") {
  CHECK(tensor(ComplexMatrix(ComplexMatrix::Identity(2, 2)), ComplexMatrix(ComplexMatrix::Identity(2, 2))).isApprox(ComplexMatrix::Identity(4, 4)));
  const DensityMatrix p = tensor(DensityMatrix::basis_projector(2, 0), DensityMatrix::basis_projector(2, 1));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(1, 1) = 1.0;
  CHECK((p.matrix() - expected).norm() == 0.0);
}

TEST_CASE("tensor matches the double-loop oracle") {
  auto rng = rng_for(21);
  for (int k = 0; k < 10; ++k) {
    ComplexMatrix a(2, 2), b(3, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(uniform(rng), uniform(rng));
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = Complex(uniform(rng), uniform(rng));
    CHECK((tensor(a, b) - kron_oracle(a, b)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("partial trace examples") {
  const DensityMatrix epr = BipartitePureState::epr().density();
  CHECK((partial_trace(epr, 2, 2, Subsystem::b).matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm() <= 1e-14);
  auto rng = rng_for(22);
  const DensityMatrix ra = random_state(2, rng), rb = random_state(3, rng);
  const DensityMatrix prod = tensor(ra, rb);
  CHECK((partial_trace(prod, 2, 3, Subsystem::b).matrix() - ra.matrix()).norm() <= 1e-12);
  CHECK((partial_trace(prod, 2, 3, Subsystem::a).matrix() - rb.matrix()).norm() <= 1e-12);
  CHECK_THROWS_AS(partial_trace(prod, 2, 2, Subsystem::a), ValidationError);
}

TEST_CASE("reduced spectra of random pure states agree on both sides") {
  auto rng = rng_for(23);
  for (int k = 0; k < 20; ++k) {
    const ComplexVector psi = random_unit_vector(6, rng);
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const DensityMatrix ra = partial_trace(rho, 2, 3, Subsystem::b);
    const DensityMatrix rb = partial_trace(rho, 2, 3, Subsystem::a);
    CHECK(std::abs(ra.matrix().trace().real() - 1.0) <= 1e-12);
    const Eigen::VectorXd ea = hermitian_eigenvalues(ra.matrix()), eb = hermitian_eigenvalues(rb.matrix());
    // rb has one extra zero eigenvalue; compare the top two.
    CHECK(std::abs(ea(1) - eb(2)) <= 1e-10);
    CHECK(std::abs(ea(0) - eb(1)) <= 1e-10);
    CHECK(std::abs(eb(0)) <= 1e-10);
    const auto state = BipartitePureState::make(2, 3, psi);
    CHECK(std::abs(entanglement_entropy(state, Subsystem::a) - entanglement_entropy(state, Subsystem::b)) <= 1e-10);
  }
}

TEST_CASE("von neumann entropy examples") {
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::basis_projector(3, 1))) <= 1e-14);
  CHECK(von_neumann_entropy(diag({0.25, 0.75})) == doctest::Approx(binary_entropy_oracle(0.25)).epsilon(1e-13));
}

TEST_CASE("relative entropy examples") {
  auto rng = rng_for(24);
  const DensityMatrix r = random_state(3, rng);
  CHECK(std::abs(relative_entropy(r, r)) <= 1e-10);
  const DensityMatrix zero = DensityMatrix::basis_projector(2, 0), one = DensityMatrix::basis_projector(2, 1);
  CHECK(relative_entropy(zero, DensityMatrix::maximally_mixed(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relative_entropy(zero, one) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(relative_entropy(zero, DensityMatrix::maximally_mixed(3)), ValidationError);
}

TEST_CASE("relative min-entropy examples") {
  auto rng = rng_for(25);
  const DensityMatrix r = random_state(3, rng);
  CHECK(std::abs(relative_min_entropy(r, r)) <= 1e-9);
  CHECK(relative_min_entropy(DensityMatrix::maximally_mixed(2), diag({0.25, 0.75})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relative_min_entropy(DensityMatrix::basis_projector(2, 0), DensityMatrix::basis_projector(2, 1)) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("D is bounded by D_inf on random pairs") {
  auto rng = rng_for(26);
  for (int k = 0; k < 100; ++k) {
    const int dim = 2 + k % 3;
    const DensityMatrix rho = random_state(dim, rng, k % 2 ? 1 : 0), sigma = random_state(dim, rng);
    CHECK(relative_entropy(rho, sigma) <= relative_min_entropy(rho, sigma) + 1e-9);
  }
}

TEST_CASE("D is bounded by K when rho <= 2^K sigma") {
  auto rng = rng_for(27);
  for (int k = 0; k < 100; ++k) {
    // sigma = 2^-K rho + (1 - 2^-K) omega dominates 2^-K rho.
    const double kbits = 0.1 + 3.0 * uniform(rng);
    const double w = std::exp2(-kbits);
    const DensityMatrix rho = random_state(3, rng), omega = random_state(3, rng);
    const DensityMatrix sigma = DensityMatrix::from_matrix(w * rho.matrix() + (1.0 - w) * omega.matrix());
    CHECK(relative_entropy(rho, sigma) <= kbits + 1e-9);
    CHECK(relative_min_entropy(rho, sigma) <= kbits + 1e-9);
  }
}

TEST_CASE("pinsker inequality in bits") {
  auto rng = rng_for(28);
  for (int k = 0; k < 200; ++k) {
    const int dim = 2 + k % 3;
    const DensityMatrix rho = random_state(dim, rng), sigma = random_state(dim, rng);
    const double l1 = 2.0 * trace_distance(rho, sigma);
    CHECK(0.5 * l1 * l1 <= std::log(2.0) * relative_entropy(rho, sigma) + 1e-9);
  }
}

TEST_CASE("relative entropy chain rule for labeled mixtures") {
  auto rng = rng_for(29);
  for (int k = 0; k < 100; ++k) {
    const int labels = 2 + k % 3, dim = 2;
    std::vector<double> p(static_cast<std::size_t>(labels)), q(p.size());
    double sp = 0.0, sq = 0.0;
    for (std::size_t z = 0; z < p.size(); ++z) sp += (p[z] = 0.05 + uniform(rng)), sq += (q[z] = 0.05 + uniform(rng));
    std::vector<DensityMatrix> rz, rpz;
    std::vector<std::vector<int>> lab;
    for (int z = 0; z < labels; ++z) {
      p[static_cast<std::size_t>(z)] /= sp;
      q[static_cast<std::size_t>(z)] /= sq;
      rz.push_back(random_state(dim, rng));
      rpz.push_back(random_state(dim, rng));
      lab.push_back({z});
    }
    const auto rho = CqState::make({labels}, lab, p, rz);
    const auto rho_prime = CqState::make({labels}, lab, q, rpz);
    double classical = 0.0, conditional = 0.0;
    for (std::size_t z = 0; z < p.size(); ++z) {
      classical += q[z] * std::log2(q[z] / p[z]);
      conditional += q[z] * relative_entropy(rpz[z], rz[z]);
    }
    CHECK(relative_entropy(rho_prime.embed(), rho.embed()) == doctest::Approx(classical + conditional).epsilon(1e-9));
  }
}

TEST_CASE("mutual information examples") {
  auto rng = rng_for(30);
  const DensityMatrix prod = tensor(random_state(2, rng), random_state(3, rng));
  CHECK(std::abs(mutual_information(prod, 2, 3)) <= 1e-9);
  CHECK(mutual_information(BipartitePureState::epr().density(), 2, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mutual_information(diag({0.5, 0.0, 0.0, 0.5}), 2, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("randomized chain rule over all permutations") {
  auto rng = rng_for(31);
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 3;
    std::vector<Variable> schema;
    for (int i = 0; i < n; ++i) schema.push_back({"X" + std::to_string(i), 2});
    schema.push_back({"A", 3});
    std::vector<double> w(static_cast<std::size_t>(3) << n);
    double s = 0.0;
    for (double& v : w) s += (v = uniform(rng) * uniform(rng));
    for (double& v : w) v /= s;
    const JointTable t = JointTable::make(schema, w);
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const std::vector<int> a{n}, none;
    const double whole = conditional_mutual_information(t, all, a, none);
    std::vector<int> perm = all;
    double total = 0.0;
    int count = 0;
    do {
      std::vector<int> prefix;
      for (int i : perm) {
        const std::vector<int> xi{i};
        total += conditional_mutual_information(t, xi, a, prefix);
        prefix.push_back(i);
      }
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(std::abs(total / count - whole) <= 1e-9);
  }
}

TEST_CASE("entanglement entropy examples") {
  CHECK(entanglement_entropy(BipartitePureState::epr()) == doctest::Approx(1.0).epsilon(1e-14));
  ComplexVector prod = ComplexVector::Zero(4);
  prod(0) = 1.0;
  CHECK(std::abs(entanglement_entropy(BipartitePureState::make(2, 2, prod))) <= 1e-14);
  const double th = std::numbers::pi / 6;
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = std::cos(th);
  v(3) = std::sin(th);
  const double c2 = std::cos(th) * std::cos(th);
  CHECK(entanglement_entropy(BipartitePureState::make(2, 2, v)) == doctest::Approx(binary_entropy_oracle(c2)).epsilon(1e-12));
  ComplexVector bad = ComplexVector::Ones(4);
  CHECK_THROWS_AS(BipartitePureState::make(2, 2, bad), ValidationError);
}

TEST_CASE("eof of two-qubit states") {
  CHECK(eof_two_qubit(BipartitePureState::epr().density()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(eof_two_qubit(diag({0.1, 0.2, 0.3, 0.4}))) <= 1e-12);
  const double p = 0.9;
  const DensityMatrix werner =
      DensityMatrix::from_matrix(p * BipartitePureState::epr().density().matrix() + (1 - p) * ComplexMatrix::Identity(4, 4) / 4.0);
  const double c = std::max(0.0, (3 * p - 1) / 2);
  CHECK(eof_two_qubit(werner) == doctest::Approx(binary_entropy_oracle((1 + std::sqrt(1 - c * c)) / 2)).epsilon(1e-10));
  CHECK_THROWS_AS(eof_two_qubit(DensityMatrix::maximally_mixed(3)), ValidationError);
}

TEST_CASE("eof agrees with entanglement entropy on pure states") {
  auto rng = rng_for(32);
  for (int k = 0; k < 50; ++k) {
    const auto psi = BipartitePureState::make(2, 2, random_unit_vector(4, rng));
    CHECK(std::abs(eof_two_qubit(psi.density()) - entanglement_entropy(psi)) <= 1e-8);
  }
}

TEST_CASE("eof vanishes on separable mixtures") {
  auto rng = rng_for(33);
  for (int k = 0; k < 20; ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    double s = 0.0;
    std::vector<double> w(4);
    for (double& v : w) s += (v = uniform(rng));
    for (double v : w) {
      const ComplexVector a = random_unit_vector(2, rng), b = random_unit_vector(2, rng);
      const ComplexVector ab = kron(a, b);
      m += (v / s) * ab * ab.adjoint();
    }
    CHECK(std::abs(eof_two_qubit(DensityMatrix::from_matrix(m))) <= 1e-8);
  }
}

TEST_CASE("trace distance and fidelity examples") {
  auto rng = rng_for(34);
  const DensityMatrix r = random_state(3, rng);
  CHECK(std::abs(trace_distance(r, r)) <= 1e-12);
  CHECK(fidelity(r, r) == doctest::Approx(1.0).epsilon(1e-9));
  const DensityMatrix zero = DensityMatrix::basis_projector(2, 0), one = DensityMatrix::basis_projector(2, 1);
  CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
  CHECK(std::abs(fidelity(zero, one)) <= 1e-12);
  CHECK(trace_distance(zero, DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quantum raz lemma examples") {
  const DensityMatrix half = DensityMatrix::maximally_mixed(2);
  const std::vector<std::vector<int>> labels{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const auto sigma = CqState::make({2, 2}, labels, {0.25, 0.25, 0.25, 0.25}, {half, half, half, half});
  const auto same = quantum_raz_audit(sigma, sigma);
  CHECK(std::abs(same.lhs) <= 1e-12);
  CHECK(std::abs(same.rhs) <= 1e-12);
  // X1 = X2 = A classically.
  const DensityMatrix z = DensityMatrix::basis_projector(2, 0), o = DensityMatrix::basis_projector(2, 1);
  const auto rho = CqState::make({2, 2}, labels, {0.5, 0.0, 0.0, 0.5}, {z, z, o, o});
  const auto audit = quantum_raz_audit(rho, sigma);
  CHECK(audit.lhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(audit.lhs <= audit.rhs + 1e-9);
}

TEST_CASE("quantum raz lemma on random cq states") {
  auto rng = rng_for(35);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 3, dim = 1 + k % 2;
    std::vector<int> sizes(static_cast<std::size_t>(n), 2);
    std::vector<std::vector<int>> labels;
    std::vector<double> wr, ws;
    std::vector<DensityMatrix> sr, ss;
    // Product sigma: independent marginals per register and a fixed sigma^A.
    std::vector<double> marg(static_cast<std::size_t>(n));
    for (double& m : marg) m = 0.2 + 0.6 * uniform(rng);
    const DensityMatrix sa = random_state(dim, rng);
    double total = 0.0;
    for (int x = 0; x < (1 << n); ++x) {
      std::vector<int> l;
      double ps = 1.0;
      for (int i = 0; i < n; ++i) {
        const int bit = (x >> (n - 1 - i)) & 1;
        l.push_back(bit);
        ps *= bit ? marg[static_cast<std::size_t>(i)] : 1.0 - marg[static_cast<std::size_t>(i)];
      }
      labels.push_back(l);
      ws.push_back(ps);
      ss.push_back(sa);
      wr.push_back(uniform(rng));
      total += wr.back();
      sr.push_back(random_state(dim, rng));
    }
    for (double& w : wr) w /= total;
    const auto rho = CqState::make(sizes, labels, wr, sr);
    const auto sigma = CqState::make(sizes, labels, ws, ss);
    const auto audit = quantum_raz_audit(rho, sigma);
    CHECK(std::isfinite(audit.lhs));
    CHECK(audit.lhs <= audit.rhs + 1e-9);
  }
}

TEST_CASE("raz audit rejects non-product sigma") {
  const DensityMatrix z = DensityMatrix::basis_projector(2, 0), o = DensityMatrix::basis_projector(2, 1);
  const std::vector<std::vector<int>> labels{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const auto rho = CqState::make({2, 2}, labels, {0.25, 0.25, 0.25, 0.25}, {z, z, o, o});
  const auto corr = CqState::make({2, 2}, labels, {0.5, 0.0, 0.0, 0.5}, {z, z, z, z});
  CHECK_THROWS_AS(quantum_raz_audit(rho, corr), ValidationError);
  const auto entangled_a = CqState::make({2, 2}, labels, {0.25, 0.25, 0.25, 0.25}, {z, z, o, o});
  CHECK_THROWS_AS(quantum_raz_audit(rho, entangled_a), ValidationError);
}

TEST_CASE("cq state validation") {
  const DensityMatrix z = DensityMatrix::basis_projector(2, 0);
  CHECK_THROWS_AS(CqState::make({2}, {{0}, {1}}, {0.5, 0.6}, {z, z}), ValidationError);
  CHECK_THROWS_AS(CqState::make({2}, {{0}, {2}}, {0.5, 0.5}, {z, z}), ValidationError);
}
