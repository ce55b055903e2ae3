#include "support.hpp"

#include "nlg/error.hpp"
#include "nlg/io.hpp"

#include <doctest.h>

using namespace nlg;
using namespace nlg::testing;

namespace {

Game always_win_game() {
  return make_game(2, 2, 2, 2, [](int, int) { return 0.25; }, [](int, int, int, int) { return true; });
}

/// Win iff a == x, independent of y and b.
Game alice_only_game(std::mt19937_64& rng) {
  std::vector<double> mu(6);
  double s = 0.0;
  for (double& m : mu) s += (m = 0.1 + uniform(rng));
  std::vector<int> target(3);
  for (int& t : target) t = static_cast<int>(rng() % 3);
  return make_game(
      3, 2, 3, 2, [&](int x, int y) { return mu[static_cast<std::size_t>(x * 2 + y)] / s; },
      [&](int x, int, int a, int) { return a == target[static_cast<std::size_t>(x)] || a == (x + 1) % 3; });
}

}  // namespace

TEST_CASE("canonical chsh strategy") {
  const auto s = canonical_chsh_strategy();
  const Game g = chsh_game();
  CHECK(std::abs(win_probability(behavior_of(s, g), g) - qval_chsh()) <= 1e-12);
  CHECK((partial_trace(s.state(), 2, 2, Subsystem::a).matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm() <= 1e-12);
  CHECK((partial_trace(s.state(), 2, 2, Subsystem::b).matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm() <= 1e-12);
  CHECK(entanglement_entropy(BipartitePureState::epr()) == doctest::Approx(1.0));
  CHECK(s.is_pure());
}

TEST_CASE("deterministic embedding yields the deterministic behavior") {
  auto rng = rng_for(41);
  const Game g = random_game(3, 2, 3, 2, rng);
  const std::vector<int> f{2, 0, 1}, h{1, 1};
  const Behavior q = behavior_of(deterministic_strategy(g, f, h, 3), g);
  const Behavior d = deterministic_behavior(g, f, h);
  for (std::size_t i = 0; i < q.table().size(); ++i) CHECK(std::abs(q.table()[i] - d.table()[i]) <= 1e-14);
  CHECK(win_probability(d, g) == doctest::Approx(deterministic_value(g, f, h)).epsilon(1e-14));
}

TEST_CASE("behavior matches the dense trace oracle") {
  auto rng = rng_for(42);
  const Game g = random_game(2, 3, 2, 3, rng);
  for (int k = 0; k < 10; ++k) {
    const auto s = random_strategy(g, 2, 3, rng);
    const Behavior p = behavior_of(s, g);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 3; ++b) {
            const ComplexMatrix m = kron_oracle(s.a_measurements()[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)],
                                                s.b_measurements()[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)]);
            CHECK(std::abs(p(x, y, a, b) - trace_oracle(m, s.state().matrix())) <= 1e-10);
          }
  }
}

TEST_CASE("behaviors of random strategies are normalized and no-signaling") {
  auto rng = rng_for(43);
  for (int k = 0; k < 100; ++k) {
    const Game g = random_game(1 + k % 3, 1 + (k / 3) % 3, 2 + k % 2, 2, rng);
    const Behavior p = behavior_of(random_strategy(g, 1 + k % 3, 2, rng), g);
    CHECK(p.min_entry() >= -1e-12);
    CHECK(p.normalization_defect() <= 1e-9);
    CHECK(p.signaling_defect() <= 1e-8);
    CHECK_NOTHROW(validate_behavior(p));
  }
}

TEST_CASE("win probability examples") {
  const Game g = chsh_game();
  Behavior any = behavior_of(canonical_chsh_strategy(), g);
  CHECK(win_probability(any, always_win_game()) == doctest::Approx(1.0).epsilon(1e-14));
  Behavior uniform_answers(2, 2, 2, 2, std::vector<double>(16, 0.25));
  CHECK(win_probability(uniform_answers, g) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("win probability is linear in the state") {
  auto rng = rng_for(44);
  const Game g = random_game(2, 2, 3, 2, rng);
  for (int k = 0; k < 20; ++k) {
    const auto s = random_strategy(g, 2, 2, rng);
    const DensityMatrix r1 = DensityMatrix::from_matrix(random_density(4, rng));
    const DensityMatrix r2 = DensityMatrix::from_matrix(random_density(4, rng));
    const double w = uniform(rng);
    const double v1 = win_probability(behavior_of(s.with_state(r1), g), g);
    const double v2 = win_probability(behavior_of(s.with_state(r2), g), g);
    const DensityMatrix mix = DensityMatrix::from_matrix(w * r1.matrix() + (1 - w) * r2.matrix());
    CHECK(std::abs(win_probability(behavior_of(s.with_state(mix), g), g) - (w * v1 + (1 - w) * v2)) <= 1e-10);
  }
}

TEST_CASE("strategy validation") {
  auto s = canonical_chsh_strategy();
  MeasurementFamily bad = s.a_measurements();
  bad[0][0] *= 0.5;
  CHECK_THROWS_WITH_AS(QuantumStrategy::make(2, 2, s.state(), bad, s.b_measurements()),
                       doctest::Contains("sum to identity"), ValidationError);
  CHECK_THROWS_AS(QuantumStrategy::make(2, 3, s.state(), s.a_measurements(), s.b_measurements()), ValidationError);
  auto rng = rng_for(45);
  CHECK_THROWS_AS(behavior_of(s, random_game(3, 2, 2, 2, rng)), ValidationError);
  Behavior signaling(2, 2, 2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) signaling(x, y, y, 0) = 1.0;
  CHECK_THROWS_WITH_AS(validate_behavior(signaling), doctest::Contains("signaling"), ValidationError);
}

TEST_CASE("noise examples") {
  const Game g = chsh_game();
  const auto s = canonical_chsh_strategy();
  const auto same = apply_noise(s, {NoiseKind::epr_fidelity_mix, 0.0});
  CHECK((same.state().matrix() - s.state().matrix()).norm() == 0.0);
  const auto full = apply_noise(s, {NoiseKind::depolarizing, 1.0});
  CHECK((full.state().matrix() - ComplexMatrix::Identity(4, 4) / 4.0).norm() <= 1e-15);
  CHECK(win_probability(behavior_of(full, g), g) == doctest::Approx(0.5).epsilon(1e-14));
  const double c2 = std::cos(std::numbers::pi / 8) * std::cos(std::numbers::pi / 8);
  for (auto kind : {NoiseKind::depolarizing, NoiseKind::epr_fidelity_mix}) {
    const auto noisy = apply_noise(s, {kind, 0.1});
    CHECK(std::abs(win_probability(behavior_of(noisy, g), g) - (0.9 * c2 + 0.1 * 0.5)) <= 1e-12);
  }
  CHECK_THROWS_AS(apply_noise(s, {NoiseKind::depolarizing, 1.5}), ValidationError);
}

TEST_CASE("noise level for a target win probability") {
  const Game g = chsh_game();
  const double nu = noise_for_win_probability(qval_chsh(), 0.80, 0.5);
  const auto noisy = apply_noise(canonical_chsh_strategy(), {NoiseKind::depolarizing, nu});
  CHECK(std::abs(win_probability(behavior_of(noisy, g), g) - 0.80) <= 1e-12);
}

TEST_CASE("fidelity mix keeps fidelity at least one minus nu") {
  auto rng = rng_for(46);
  for (int k = 0; k < 30; ++k) {
    const DensityMatrix pure = DensityMatrix::pure(random_unit_vector(4, rng));
    const auto s = canonical_chsh_strategy().with_state(pure);
    const double nu = uniform(rng);
    const auto noisy = apply_noise(s, {NoiseKind::epr_fidelity_mix, nu});
    CHECK(fidelity(pure, noisy.state()) >= 1.0 - nu - 1e-12);
  }
}

TEST_CASE("seesaw reaches the chsh quantum value") {
  SeesawOptions opt;
  opt.restarts = 20;
  const auto r = seesaw_optimize(chsh_game(), opt);
  CHECK(r.value >= 0.8535);
  CHECK(r.value <= qval_chsh() + 1e-9);
  CHECK(r.best_restart >= 0);
  CHECK(r.best_restart < 20);
}

TEST_CASE("seesaw history is non-decreasing") {
  auto rng = rng_for(47);
  for (int k = 0; k < 10; ++k) {
    const Game g = random_game(2, 2, 2, 2, rng);
    SeesawOptions opt;
    opt.restarts = 3;
    opt.seed = static_cast<std::uint64_t>(k);
    const auto r = seesaw_optimize(g, opt);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1] - 1e-12);
    CHECK(r.value <= 1.0);
  }
}

TEST_CASE("seesaw is deterministic for a fixed seed") {
  SeesawOptions opt;
  opt.restarts = 4;
  opt.seed = 9;
  const auto a = seesaw_optimize(chsh_game(), opt), b = seesaw_optimize(chsh_game(), opt);
  CHECK(a.value == b.value);
  CHECK(a.best_restart == b.best_restart);
  CHECK(strategy_to_json(a.strategy) == strategy_to_json(b.strategy));
}

TEST_CASE("seesaw on an always-win game converges in one iteration") {
  SeesawOptions opt;
  opt.restarts = 2;
  const auto r = seesaw_optimize(always_win_game(), opt);
  REQUIRE_FALSE(r.history.empty());
  CHECK(r.history.front() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("seesaw matches the classical value on games without quantum advantage") {
  auto rng = rng_for(48);
  for (int k = 0; k < 5; ++k) {
    const Game g = alice_only_game(rng);
    SeesawOptions opt;
    opt.dim = 3;
    opt.restarts = 5;
    opt.seed = static_cast<std::uint64_t>(k);
    CHECK(std::abs(seesaw_optimize(g, opt).value - brute_force_cval(g)) <= 1e-9);
  }
}

TEST_CASE("seesaw refined from a deterministic embedding never loses value") {
  auto rng = rng_for(49);
  for (int k = 0; k < 10; ++k) {
    const Game g = random_game(2, 2, 2, 2, rng);
    // Find an optimal deterministic pair by brute force.
    std::vector<int> best_f(2), best_h(2);
    double best = -1.0;
    for (int f = 0; f < 4; ++f)
      for (int h = 0; h < 4; ++h) {
        const std::vector<int> fv{f & 1, f >> 1}, hv{h & 1, h >> 1};
        const double v = deterministic_value(g, fv, hv);
        if (v > best) best = v, best_f = fv, best_h = hv;
      }
    const auto r = seesaw_refine(g, deterministic_strategy(g, best_f, best_h), SeesawOptions{});
    CHECK(r.value >= classical_value(g) - 1e-9);
    CHECK(r.value <= 1.0);
  }
}

TEST_CASE("strategy json round trip") {
  auto rng = rng_for(50);
  const auto s = random_strategy(chsh_game(), 2, 2, rng);
  const Json j = strategy_to_json(s);
  const auto back = strategy_from_json(j);
  CHECK(strategy_to_json(back) == j);
  CHECK((back.state().matrix() - s.state().matrix()).norm() <= 1e-15);
}
