#include "nlg/strategies.hpp"

#include "nlg/error.hpp"

#include <cmath>
#include <numbers>

namespace nlg {

namespace {

MeasurementFamily checked_family(MeasurementFamily family, int dim, const char* side) {
  const std::string who(side);
  if (family.empty()) throw ValidationError(who + " measurements: no questions");
  const std::size_t outcomes = family.front().size();
  if (outcomes == 0) throw ValidationError(who + " measurements: no outcomes");
  for (auto& povm : family) {
    if (povm.size() != outcomes) throw ValidationError(who + " measurements: outcome count differs across questions");
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (auto& e : povm) {
      if (e.rows() != dim || e.cols() != dim) throw ValidationError(who + " measurements: element dimension mismatch");
      if (!is_hermitian(e, 1e-10)) throw ValidationError(who + " measurements: element not Hermitian");
      e = hermitian_part(e);
      if (hermitian_eigenvalues(e).minCoeff() < -1e-10) throw ValidationError(who + " measurements: element not PSD");
      total += e;
    }
    if ((total - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8)
      throw ValidationError(who + " measurements: POVM elements do not sum to identity");
  }
  return family;
}

ComplexMatrix angle_projector(double theta) {
  Eigen::Vector2cd v(std::cos(theta), std::sin(theta));
  return v * v.adjoint();
}

std::vector<ComplexMatrix> two_outcome(double theta) {
  const ComplexMatrix p0 = angle_projector(theta);
  return {p0, ComplexMatrix::Identity(2, 2) - p0};
}

}  // namespace

QuantumStrategy QuantumStrategy::make(int dim_a, int dim_b, DensityMatrix state, MeasurementFamily a_measurements,
                                      MeasurementFamily b_measurements) {
  if (dim_a < 1 || dim_b < 1) throw ValidationError("strategy dimensions must be positive");
  if (state.dim() != dim_a * dim_b) throw ValidationError("state dimension != dim_a * dim_b");
  auto a = checked_family(std::move(a_measurements), dim_a, "alice");
  auto b = checked_family(std::move(b_measurements), dim_b, "bob");
  return QuantumStrategy(dim_a, dim_b, std::move(state), std::move(a), std::move(b));
}

QuantumStrategy QuantumStrategy::with_state(DensityMatrix state) const {
  if (state.dim() != state_.dim()) throw ValidationError("dimension mismatch");
  return QuantumStrategy(dim_a_, dim_b_, std::move(state), a_, b_);
}

Behavior::Behavior(int nx, int ny, int na, int nb)
    : nx_(nx), ny_(ny), na_(na), nb_(nb), p_(static_cast<std::size_t>(nx * ny * na * nb), 0.0) {
  if (nx < 1 || ny < 1 || na < 1 || nb < 1) throw ValidationError("behavior alphabets must be non-empty");
}

Behavior::Behavior(int nx, int ny, int na, int nb, std::vector<double> table) : Behavior(nx, ny, na, nb) {
  if (table.size() != p_.size()) throw ValidationError("behavior table size mismatch");
  p_ = std::move(table);
}

double Behavior::alice_marginal(int x, int y, int a) const {
  double s = 0.0;
  for (int b = 0; b < nb_; ++b) s += (*this)(x, y, a, b);
  return s;
}

double Behavior::bob_marginal(int x, int y, int b) const {
  double s = 0.0;
  for (int a = 0; a < na_; ++a) s += (*this)(x, y, a, b);
  return s;
}

double Behavior::normalization_defect() const {
  double worst = 0.0;
  for (int x = 0; x < nx_; ++x)
    for (int y = 0; y < ny_; ++y) {
      double s = 0.0;
      for (int a = 0; a < na_; ++a)
        for (int b = 0; b < nb_; ++b) s += (*this)(x, y, a, b);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  return worst;
}

double Behavior::signaling_defect() const {
  double worst = 0.0;
  for (int x = 0; x < nx_; ++x)
    for (int a = 0; a < na_; ++a)
      for (int y = 1; y < ny_; ++y) worst = std::max(worst, std::abs(alice_marginal(x, y, a) - alice_marginal(x, 0, a)));
  for (int y = 0; y < ny_; ++y)
    for (int b = 0; b < nb_; ++b)
      for (int x = 1; x < nx_; ++x) worst = std::max(worst, std::abs(bob_marginal(x, y, b) - bob_marginal(0, y, b)));
  return worst;
}

double Behavior::min_entry() const { return *std::min_element(p_.begin(), p_.end()); }

Behavior Behavior::product_of_marginals() const {
  Behavior out(nx_, ny_, na_, nb_);
  for (int x = 0; x < nx_; ++x)
    for (int y = 0; y < ny_; ++y)
      for (int a = 0; a < na_; ++a)
        for (int b = 0; b < nb_; ++b) out(x, y, a, b) = alice_marginal(x, 0, a) * bob_marginal(0, y, b);
  return out;
}

void validate_behavior(const Behavior& p) {
  if (p.min_entry() < -1e-12) throw ValidationError("behavior has negative entries");
  if (p.normalization_defect() > 1e-9) throw ValidationError("behavior not normalized");
  if (p.signaling_defect() > 1e-8) throw ValidationError("behavior is signaling");
}

Behavior behavior_of(const QuantumStrategy& s) {
  Behavior out(s.num_x(), s.num_y(), s.num_a(), s.num_b());
  const ComplexMatrix& rho = s.state().matrix();
  const ComplexMatrix id_b = ComplexMatrix::Identity(s.dim_b(), s.dim_b());
  for (int x = 0; x < s.num_x(); ++x)
    for (int a = 0; a < s.num_a(); ++a) {
      // Bob-side operator M with Tr(B M) = Tr((A (x) B) rho).
      const ComplexMatrix m =
          partial_trace(ComplexMatrix(kron(s.a_measurements()[x][a], id_b) * rho), s.dim_a(), s.dim_b(), Subsystem::a);
      for (int y = 0; y < s.num_y(); ++y)
        for (int b = 0; b < s.num_b(); ++b) out(x, y, a, b) = (s.b_measurements()[y][b] * m).trace().real();
    }
  return out;
}

Behavior behavior_of(const QuantumStrategy& s, const Game& g, int rounds) {
  auto power = [rounds](int k) {
    int p = 1;
    for (int i = 0; i < rounds; ++i) p *= k;
    return p;
  };
  if (rounds < 1) throw ValidationError("rounds must be positive");
  if (s.num_x() != power(g.num_x()) || s.num_y() != power(g.num_y()) || s.num_a() != power(g.num_a()) ||
      s.num_b() != power(g.num_b()))
    throw ValidationError("strategy alphabets do not match the game");
  return behavior_of(s);
}

Behavior deterministic_behavior(const Game& g, std::span<const int> f, std::span<const int> h) {
  if (f.size() != static_cast<std::size_t>(g.num_x()) || h.size() != static_cast<std::size_t>(g.num_y()))
    throw ValidationError("deterministic strategy size mismatch");
  Behavior out(g.num_x(), g.num_y(), g.num_a(), g.num_b());
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) out(x, y, f[static_cast<std::size_t>(x)], h[static_cast<std::size_t>(y)]) = 1.0;
  return out;
}

double win_probability(const Behavior& p, const Game& g) {
  if (p.num_x() != g.num_x() || p.num_y() != g.num_y() || p.num_a() != g.num_a() || p.num_b() != g.num_b())
    throw ValidationError("behavior alphabets do not match the game");
  double v = 0.0;
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) {
      double s = 0.0;
      for (int a = 0; a < g.num_a(); ++a)
        for (int b = 0; b < g.num_b(); ++b)
          if (g.wins(x, y, a, b)) s += p(x, y, a, b);
      v += g.mu(x, y) * s;
    }
  return v;
}

QuantumStrategy apply_noise(const QuantumStrategy& s, const NoiseChannel& channel) {
  if (!(channel.nu >= 0.0 && channel.nu <= 1.0)) throw ValidationError("noise parameter must lie in [0, 1]");
  const int d = s.state().dim();
  // Both kinds mix with the identity on the full space; for a pure input the
  // result has fidelity at least 1 - nu with it.
  const ComplexMatrix mixed =
      (1.0 - channel.nu) * s.state().matrix() + channel.nu * ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return s.with_state(DensityMatrix::from_matrix(mixed));
}

double noise_for_win_probability(double ideal, double target, double random_value) {
  if (!(ideal > random_value)) throw ValidationError("ideal value must exceed the random-answer value");
  if (target > ideal || target < random_value) throw ValidationError("target outside [random value, ideal]");
  return (ideal - target) / (ideal - random_value);
}

QuantumStrategy canonical_chsh_strategy() {
  const double pi = std::numbers::pi;
  MeasurementFamily a{two_outcome(0.0), two_outcome(pi / 4.0)};
  MeasurementFamily b{two_outcome(pi / 8.0), two_outcome(-pi / 8.0)};
  return QuantumStrategy::make(2, 2, BipartitePureState::epr().density(), std::move(a), std::move(b));
}

QuantumStrategy deterministic_strategy(const Game& g, std::span<const int> f, std::span<const int> h, int dim) {
  if (f.size() != static_cast<std::size_t>(g.num_x()) || h.size() != static_cast<std::size_t>(g.num_y()))
    throw ValidationError("deterministic strategy size mismatch");
  auto family = [dim](int questions, int answers, std::span<const int> choice) {
    MeasurementFamily out;
    for (int q = 0; q < questions; ++q) {
      std::vector<ComplexMatrix> povm(static_cast<std::size_t>(answers), ComplexMatrix::Zero(dim, dim));
      povm[static_cast<std::size_t>(choice[static_cast<std::size_t>(q)])] = ComplexMatrix::Identity(dim, dim);
      out.push_back(std::move(povm));
    }
    return out;
  };
  return QuantumStrategy::make(dim, dim, DensityMatrix::basis_projector(dim * dim, 0), family(g.num_x(), g.num_a(), f),
                               family(g.num_y(), g.num_b(), h));
}

}  // namespace nlg
