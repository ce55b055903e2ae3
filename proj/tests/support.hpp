#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests.
// Oracles here deliberately avoid the library routine they check.

#include "nlg/games.hpp"
#include "nlg/joint_table.hpp"
#include "nlg/quantum.hpp"
#include "nlg/repetition.hpp"
#include "nlg/strategies.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace nlg::testing {

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + 1); }

inline double uniform(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

inline double qval_chsh() { return (2.0 + std::numbers::sqrt2) / 4.0; }

/// Game with seeded uniform-ish mu and a coin-flip predicate.
inline Game random_game(int nx, int ny, int na, int nb, std::mt19937_64& rng) {
  std::vector<double> mu(static_cast<std::size_t>(nx * ny));
  double total = 0.0;
  for (double& m : mu) total += (m = 0.1 + uniform(rng));
  std::vector<int> pred(static_cast<std::size_t>(nx * ny * na * nb));
  for (int& v : pred) v = uniform(rng) < 0.5 ? 1 : 0;
  return make_game(
      nx, ny, na, nb, [&](int x, int y) { return mu[static_cast<std::size_t>(x * ny + y)] / total; },
      [&](int x, int y, int a, int b) { return pred[static_cast<std::size_t>(((x * ny + y) * na + a) * nb + b)] != 0; });
}

/// Brute force over every pair of answer functions, written with an odometer.
inline double brute_force_cval(const Game& g) {
  std::vector<int> f(static_cast<std::size_t>(g.num_x()), 0), h(static_cast<std::size_t>(g.num_y()), 0);
  auto advance = [](std::vector<int>& v, int base) {
    for (int& d : v) {
      if (++d < base) return true;
      d = 0;
    }
    return false;
  };
  double best = 0.0;
  do {
    std::fill(h.begin(), h.end(), 0);
    do {
      double v = 0.0;
      for (int x = 0; x < g.num_x(); ++x)
        for (int y = 0; y < g.num_y(); ++y)
          if (g.wins(x, y, f[static_cast<std::size_t>(x)], h[static_cast<std::size_t>(y)])) v += g.mu(x, y);
      best = std::max(best, v);
    } while (advance(h, g.num_b()));
  } while (advance(f, g.num_a()));
  return best;
}

inline ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Tr(M rho) by explicit double loop.
inline double trace_oracle(const ComplexMatrix& m, const ComplexMatrix& rho) {
  Complex s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) s += m(i, k) * rho(k, i);
  return s.real();
}

inline double binary_entropy_oracle(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Upper binomial tail by direct summation in long double.
inline double binomial_tail_oracle(double p, int n, int k_min) {
  long double s = 0.0L;
  for (int k = std::max(0, k_min); k <= n; ++k) {
    long double c = 1.0L;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    s += c * std::pow(static_cast<long double>(p), k) * std::pow(1.0L - p, n - k);
  }
  return static_cast<double>(s);
}

/// Projector onto cos(t)|0> + sin(t)|1>.
inline ComplexMatrix angle_projector(double t) {
  ComplexVector v(2);
  v << std::cos(t), std::sin(t);
  return v * v.adjoint();
}

/// Strategy on n rounds sharing one EPR pair. Each party measures once at the
/// angle selected by the parity of its question vector and copies the outcome
/// into every round. Rounds are therefore strongly correlated.
inline QuantumStrategy parity_strategy(int n) {
  const int q = 1 << n, answers = 1 << n;
  auto family = [&](double t0, double t1) {
    MeasurementFamily f;
    for (int x = 0; x < q; ++x) {
      const double t = (std::popcount(static_cast<unsigned>(x)) & 1) ? t1 : t0;
      std::vector<ComplexMatrix> povm(static_cast<std::size_t>(answers), ComplexMatrix::Zero(2, 2));
      povm.front() = angle_projector(t);
      povm.back() = angle_projector(t + std::numbers::pi / 2);
      f.push_back(std::move(povm));
    }
    return f;
  };
  const auto epr = BipartitePureState::epr();
  return QuantumStrategy::make(2, 2, DensityMatrix::pure(epr.amplitudes), family(0.0, std::numbers::pi / 4),
                               family(std::numbers::pi / 8, -std::numbers::pi / 8));
}

/// Random POVM with `outcomes` elements on C^dim.
inline std::vector<ComplexMatrix> random_povm(int dim, int outcomes, std::mt19937_64& rng) {
  std::vector<ComplexMatrix> raw;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < outcomes; ++k) {
    ComplexMatrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(uniform(rng) - 0.5, uniform(rng) - 0.5);
    raw.push_back(g * g.adjoint());
    sum += raw.back();
  }
  const ComplexMatrix inv_sqrt = psd_sqrt(sum).inverse();
  for (auto& e : raw) e = hermitian_part(ComplexMatrix(inv_sqrt * e * inv_sqrt));
  return raw;
}

inline QuantumStrategy random_strategy(const Game& g, int dim_a, int dim_b, std::mt19937_64& rng, bool product = false) {
  MeasurementFamily a, b;
  for (int x = 0; x < g.num_x(); ++x) a.push_back(random_povm(dim_a, g.num_a(), rng));
  for (int y = 0; y < g.num_y(); ++y) b.push_back(random_povm(dim_b, g.num_b(), rng));
  DensityMatrix state = product ? tensor(DensityMatrix::from_matrix(random_density(dim_a, rng)),
                                         DensityMatrix::from_matrix(random_density(dim_b, rng)))
                                : DensityMatrix::from_matrix(random_density(dim_a * dim_b, rng));
  return QuantumStrategy::make(dim_a, dim_b, std::move(state), std::move(a), std::move(b));
}

/// Pearson chi-square test at level `alpha`; true when not rejected.
inline bool chi_square_passes(std::span<const std::int64_t> counts, std::span<const double> probs, double alpha) {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (e <= 0.0) {
      if (counts[i] != 0) return false;
      continue;
    }
    stat += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
    ++cells;
  }
  if (cells < 2) return true;
  boost::math::chi_squared dist(cells - 1);
  return stat <= boost::math::quantile(boost::math::complement(dist, alpha));
}

/// P(W_j | W_S) averaged over j outside S, with the subset event computed by
/// directly counting wins; independent of the library's event machinery.
inline std::pair<double, double> subset_statistics_oracle(const JointTable& t, const Game& g, int n,
                                                          const std::vector<int>& s, double tau) {
  const int need = static_cast<int>(std::ceil((1.0 - tau) * static_cast<double>(s.size()) - 1e-12));
  std::vector<int> a(t.num_variables());
  std::vector<double> joint(static_cast<std::size_t>(n), 0.0);
  double p_ws = 0.0;
  for (std::size_t f = 0; f < t.size(); ++f) {
    if (t[f] == 0.0) continue;
    t.decode(f, a);
    // Schema is X0..,Y0..,A0..,B0.. in blocks of n.
    std::vector<int> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      w[static_cast<std::size_t>(i)] = g.wins(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(n + i)],
                                              a[static_cast<std::size_t>(2 * n + i)], a[static_cast<std::size_t>(3 * n + i)]);
    int c = 0;
    for (int i : s) c += w[static_cast<std::size_t>(i)];
    if (c < need) continue;
    p_ws += t[f];
    for (int i = 0; i < n; ++i)
      if (w[static_cast<std::size_t>(i)]) joint[static_cast<std::size_t>(i)] += t[f];
  }
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < n; ++j) {
    if (std::find(s.begin(), s.end(), j) != s.end()) continue;
    sum += joint[static_cast<std::size_t>(j)] / p_ws;
    ++count;
  }
  return {sum / count, p_ws};
}

}  // namespace nlg::testing
