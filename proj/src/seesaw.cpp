#include "nlg/error.hpp"
#include "nlg/strategies.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>

namespace nlg {

namespace {

struct Point {
  ComplexVector psi;
  MeasurementFamily a, b;
};

ComplexMatrix game_operator(const Game& g, const MeasurementFamily& a, const MeasurementFamily& b) {
  const auto da = a.front().front().rows(), db = b.front().front().rows();
  ComplexMatrix w = ComplexMatrix::Zero(da * db, da * db);
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) {
      if (g.mu(x, y) == 0.0) continue;
      for (int a_ = 0; a_ < g.num_a(); ++a_)
        for (int b_ = 0; b_ < g.num_b(); ++b_)
          if (g.wins(x, y, a_, b_)) w += g.mu(x, y) * kron(a[x][a_], b[y][b_]);
    }
  return hermitian_part(w);
}

double value_at(const Game& g, const Point& p) {
  return (p.psi.adjoint() * game_operator(g, p.a, p.b) * p.psi)(0, 0).real();
}

ComplexMatrix projector_onto(const ComplexMatrix& columns) { return columns * columns.adjoint(); }

// Re-splits range(E_b + E_b') between outcomes b and b' for every pair,
// keeping the rest fixed. Each step is optimal over projective splits of that
// range, so the objective sum_b Tr(E_b R_b) never decreases.
void pairwise_update(std::vector<ComplexMatrix>& povm, const std::vector<ComplexMatrix>& reward) {
  const std::size_t k = povm.size();
  for (std::size_t b = 0; b < k; ++b)
    for (std::size_t c = b + 1; c < k; ++c) {
      const ComplexMatrix pair = hermitian_part(ComplexMatrix(povm[b] + povm[c]));
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> range_es(pair);
      std::vector<Eigen::Index> cols;
      for (Eigen::Index i = 0; i < range_es.eigenvalues().size(); ++i)
        if (range_es.eigenvalues()(i) > 0.5) cols.push_back(i);
      if (cols.empty()) continue;
      ComplexMatrix u(pair.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) u.col(static_cast<Eigen::Index>(i)) = range_es.eigenvectors().col(cols[i]);

      const ComplexMatrix diff = hermitian_part(ComplexMatrix(u.adjoint() * (reward[b] - reward[c]) * u));
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff);
      std::vector<Eigen::Index> pos, neg;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) (es.eigenvalues()(i) >= 0.0 ? pos : neg).push_back(i);
      auto span_of = [&](const std::vector<Eigen::Index>& idx) {
        ComplexMatrix v(u.cols(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(idx[i]);
        return ComplexMatrix(u * v);
      };
      povm[b] = projector_onto(span_of(pos));
      povm[c] = projector_onto(span_of(neg));
    }
}

void update_bob(const Game& g, Point& p) {
  const auto da = static_cast<int>(p.a.front().front().rows()), db = static_cast<int>(p.b.front().front().rows());
  const ComplexMatrix rho = p.psi * p.psi.adjoint();
  const ComplexMatrix id_b = ComplexMatrix::Identity(db, db);
  std::vector<std::vector<ComplexMatrix>> m(static_cast<std::size_t>(g.num_x()));
  for (int x = 0; x < g.num_x(); ++x)
    for (int a = 0; a < g.num_a(); ++a)
      m[x].push_back(partial_trace(ComplexMatrix(kron(p.a[x][a], id_b) * rho), da, db, Subsystem::a));
  for (int y = 0; y < g.num_y(); ++y) {
    std::vector<ComplexMatrix> reward(static_cast<std::size_t>(g.num_b()), ComplexMatrix::Zero(db, db));
    for (int b = 0; b < g.num_b(); ++b) {
      for (int x = 0; x < g.num_x(); ++x)
        for (int a = 0; a < g.num_a(); ++a)
          if (g.wins(x, y, a, b)) reward[b] += g.mu(x, y) * m[x][a];
      reward[b] = hermitian_part(reward[b]);
    }
    pairwise_update(p.b[y], reward);
  }
}

void update_alice(const Game& g, Point& p) {
  const auto da = static_cast<int>(p.a.front().front().rows()), db = static_cast<int>(p.b.front().front().rows());
  const ComplexMatrix rho = p.psi * p.psi.adjoint();
  const ComplexMatrix id_a = ComplexMatrix::Identity(da, da);
  std::vector<std::vector<ComplexMatrix>> m(static_cast<std::size_t>(g.num_y()));
  for (int y = 0; y < g.num_y(); ++y)
    for (int b = 0; b < g.num_b(); ++b)
      m[y].push_back(partial_trace(ComplexMatrix(kron(id_a, p.b[y][b]) * rho), da, db, Subsystem::b));
  for (int x = 0; x < g.num_x(); ++x) {
    std::vector<ComplexMatrix> reward(static_cast<std::size_t>(g.num_a()), ComplexMatrix::Zero(da, da));
    for (int a = 0; a < g.num_a(); ++a) {
      for (int y = 0; y < g.num_y(); ++y)
        for (int b = 0; b < g.num_b(); ++b)
          if (g.wins(x, y, a, b)) reward[a] += g.mu(x, y) * m[y][b];
      reward[a] = hermitian_part(reward[a]);
    }
    pairwise_update(p.a[x], reward);
  }
}

MeasurementFamily random_projective(int questions, int outcomes, int dim, std::mt19937_64& rng) {
  MeasurementFamily out;
  for (int q = 0; q < questions; ++q) {
    const ComplexMatrix u = random_unitary(dim, rng);
    std::vector<int> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<ComplexMatrix> povm(static_cast<std::size_t>(outcomes), ComplexMatrix::Zero(dim, dim));
    for (int i = 0; i < dim; ++i) {
      const auto col = u.col(order[static_cast<std::size_t>(i)]);
      povm[static_cast<std::size_t>(i % outcomes)] += col * col.adjoint();
    }
    out.push_back(std::move(povm));
  }
  return out;
}

SeesawResult run(const Game& g, Point p, const SeesawOptions& options) {
  SeesawResult result{QuantumStrategy::make(1, 1, DensityMatrix::maximally_mixed(1), {{ComplexMatrix::Identity(1, 1)}},
                                            {{ComplexMatrix::Identity(1, 1)}}),
                      0.0, 0, {}};
  double previous = value_at(g, p);
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(game_operator(g, p.a, p.b));
    p.psi = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    update_bob(g, p);
    update_alice(g, p);
    const double v = value_at(g, p);
    result.history.push_back(v);
    if (v - previous < options.tolerance) {
      previous = std::max(previous, v);
      break;
    }
    previous = v;
  }
  const auto da = static_cast<int>(p.a.front().front().rows()), db = static_cast<int>(p.b.front().front().rows());
  const ComplexVector psi = p.psi / p.psi.norm();
  result.strategy = QuantumStrategy::make(da, db, DensityMatrix::pure(psi), std::move(p.a), std::move(p.b));
  result.value = std::min(1.0, win_probability(behavior_of(result.strategy), g));
  return result;
}

bool is_projective(const MeasurementFamily& family) {
  for (const auto& povm : family)
    for (const auto& e : povm)
      if ((e * e - e).cwiseAbs().maxCoeff() > 1e-8) return false;
  return true;
}

}  // namespace

SeesawResult seesaw_refine(const Game& g, const QuantumStrategy& initial, const SeesawOptions& options) {
  if (initial.num_x() != g.num_x() || initial.num_y() != g.num_y() || initial.num_a() != g.num_a() ||
      initial.num_b() != g.num_b())
    throw ValidationError("seesaw: strategy alphabets do not match the game");
  if (!initial.is_pure()) throw ValidationError("seesaw: initial state must be pure");
  if (!is_projective(initial.a_measurements()) || !is_projective(initial.b_measurements()))
    throw ValidationError("seesaw: initial measurements must be projective");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(initial.state().matrix());
  Point p{es.eigenvectors().col(es.eigenvectors().cols() - 1), initial.a_measurements(), initial.b_measurements()};
  return run(g, std::move(p), options);
}

SeesawResult seesaw_optimize(const Game& g, const SeesawOptions& options) {
  if (options.dim < 1) throw ValidationError("seesaw: dim must be >= 1");
  if (options.restarts < 1) throw ValidationError("seesaw: restarts must be >= 1");
  std::optional<SeesawResult> best;
  for (int r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Point p;
    p.a = random_projective(g.num_x(), g.num_a(), options.dim, rng);
    p.b = random_projective(g.num_y(), g.num_b(), options.dim, rng);
    p.psi = random_unit_vector(options.dim * options.dim, rng);
    SeesawResult candidate = run(g, std::move(p), options);
    candidate.best_restart = r;
    if (!best || candidate.value > best->value) best = std::move(candidate);
  }
  return std::move(*best);
}

}  // namespace nlg
