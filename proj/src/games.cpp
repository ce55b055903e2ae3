#include "nlg/games.hpp"

#include "nlg/error.hpp"

#include <cmath>
#include <numeric>

namespace nlg {

namespace {

void require_alphabet(const std::vector<Label>& labels, const char* name) {
  if (labels.empty()) throw ValidationError(std::string(name) + " is empty");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) throw ValidationError(std::string(name) + " has duplicate labels");
}

}  // namespace

Game validate_game(const RawGame& raw) {
  require_alphabet(raw.x_alphabet, "x_alphabet");
  require_alphabet(raw.y_alphabet, "y_alphabet");
  require_alphabet(raw.a_alphabet, "a_alphabet");
  require_alphabet(raw.b_alphabet, "b_alphabet");
  const std::size_t nx = raw.x_alphabet.size(), ny = raw.y_alphabet.size();
  const std::size_t na = raw.a_alphabet.size(), nb = raw.b_alphabet.size();

  if (raw.mu.size() != nx) throw ValidationError("dimension mismatch: mu rows != |X|");
  Game g;
  g.mu_.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  double total = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (raw.mu[x].size() != ny) throw ValidationError("dimension mismatch: mu columns != |Y|");
    for (std::size_t y = 0; y < ny; ++y) {
      const double p = raw.mu[x][y];
      if (!std::isfinite(p)) throw ValidationError("mu entry not finite");
      if (p < 0.0) throw ValidationError("negative probability in mu");
      g.mu_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = p;
      total += p;
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("mu not normalized");
  g.mu_ /= total;

  if (raw.predicate.size() != nx) throw ValidationError("dimension mismatch: predicate[x]");
  g.predicate_.reserve(nx * ny * na * nb);
  for (std::size_t x = 0; x < nx; ++x) {
    if (raw.predicate[x].size() != ny) throw ValidationError("dimension mismatch: predicate[x][y]");
    for (std::size_t y = 0; y < ny; ++y) {
      if (raw.predicate[x][y].size() != na) throw ValidationError("dimension mismatch: predicate[x][y][a]");
      for (std::size_t a = 0; a < na; ++a) {
        if (raw.predicate[x][y][a].size() != nb) throw ValidationError("dimension mismatch: predicate[x][y][a][b]");
        for (std::size_t b = 0; b < nb; ++b) {
          const int v = raw.predicate[x][y][a][b];
          if (v != 0 && v != 1) throw ValidationError("predicate entries must be 0 or 1");
          g.predicate_.push_back(static_cast<std::uint8_t>(v));
        }
      }
    }
  }
  g.x_alphabet_ = raw.x_alphabet;
  g.y_alphabet_ = raw.y_alphabet;
  g.a_alphabet_ = raw.a_alphabet;
  g.b_alphabet_ = raw.b_alphabet;
  return g;
}

RawGame Game::to_raw() const {
  RawGame raw;
  raw.x_alphabet = x_alphabet_;
  raw.y_alphabet = y_alphabet_;
  raw.a_alphabet = a_alphabet_;
  raw.b_alphabet = b_alphabet_;
  raw.mu.resize(static_cast<std::size_t>(num_x()));
  raw.predicate.resize(static_cast<std::size_t>(num_x()));
  for (int x = 0; x < num_x(); ++x) {
    auto& row = raw.mu[static_cast<std::size_t>(x)];
    auto& px = raw.predicate[static_cast<std::size_t>(x)];
    px.resize(static_cast<std::size_t>(num_y()));
    for (int y = 0; y < num_y(); ++y) {
      row.push_back(mu_(x, y));
      auto& pxy = px[static_cast<std::size_t>(y)];
      pxy.resize(static_cast<std::size_t>(num_a()));
      for (int a = 0; a < num_a(); ++a)
        for (int b = 0; b < num_b(); ++b) pxy[static_cast<std::size_t>(a)].push_back(wins(x, y, a, b) ? 1 : 0);
    }
  }
  return raw;
}

Game chsh_game() {
  return make_game(2, 2, 2, 2, [](int, int) { return 0.25; },
                   [](int x, int y, int a, int b) { return (a ^ b) == (x & y); });
}

double deterministic_value(const Game& g, std::span<const int> f, std::span<const int> h) {
  if (f.size() != static_cast<std::size_t>(g.num_x()) || h.size() != static_cast<std::size_t>(g.num_y()))
    throw ValidationError("deterministic strategy size mismatch");
  double v = 0.0;
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y)
      if (g.wins(x, y, f[static_cast<std::size_t>(x)], h[static_cast<std::size_t>(y)])) v += g.mu(x, y);
  return v;
}

double classical_value(const Game& g, double budget) {
  const double count = std::pow(static_cast<double>(g.num_a()), g.num_x()) *
                       std::pow(static_cast<double>(g.num_b()), g.num_y());
  if (count > budget) throw BudgetExceeded("classical value: strategy enumeration exceeds budget");

  // Enumerate Alice's functions; for a fixed f the best h decouples per y.
  std::vector<int> f(static_cast<std::size_t>(g.num_x()), 0);
  double best = 0.0;
  while (true) {
    double value = 0.0;
    for (int y = 0; y < g.num_y(); ++y) {
      double best_b = 0.0;
      for (int b = 0; b < g.num_b(); ++b) {
        double s = 0.0;
        for (int x = 0; x < g.num_x(); ++x)
          if (g.wins(x, y, f[static_cast<std::size_t>(x)], b)) s += g.mu(x, y);
        best_b = std::max(best_b, s);
      }
      value += best_b;
    }
    best = std::max(best, value);
    std::size_t i = 0;
    while (i < f.size() && ++f[i] == g.num_a()) f[i++] = 0;
    if (i == f.size()) break;
  }
  return std::min(best, 1.0);
}

ThresholdGameSpec make_threshold_spec(Game base, int n, double threshold) {
  if (n < 1) throw ValidationError("threshold game needs n >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("threshold must lie in (0, 1]");
  return ThresholdGameSpec{std::move(base), n, threshold};
}

int required_wins(double threshold, int rounds) {
  return std::max(0, static_cast<int>(std::ceil(threshold * rounds - 1e-12)));
}

bool threshold_predicate(const ThresholdGameSpec& spec, std::span<const int> xs, std::span<const int> ys,
                         std::span<const int> as, std::span<const int> bs) {
  const auto n = static_cast<std::size_t>(spec.n);
  if (xs.size() != n || ys.size() != n || as.size() != n || bs.size() != n)
    throw ValidationError("threshold predicate: tuple length != n");
  const Game& g = spec.base;
  int wins = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] < 0 || xs[i] >= g.num_x() || ys[i] < 0 || ys[i] >= g.num_y() || as[i] < 0 || as[i] >= g.num_a() ||
        bs[i] < 0 || bs[i] >= g.num_b())
      throw ValidationError("threshold predicate: entry outside alphabet");
    if (g.wins(xs[i], ys[i], as[i], bs[i])) ++wins;
  }
  return wins >= required_wins(spec.threshold, spec.n);
}

}  // namespace nlg
