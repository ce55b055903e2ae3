#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nlg {

/// Alphabet entry as it appears in serialized games.
using Label = std::variant<std::int64_t, std::string>;

/// Unvalidated game description, e.g. as parsed from JSON.
struct RawGame {
  std::vector<Label> x_alphabet, y_alphabet, a_alphabet, b_alphabet;
  std::vector<std::vector<double>> mu;
  /// predicate[x][y][a][b] in {0, 1}.
  std::vector<std::vector<std::vector<std::vector<int>>>> predicate;
};

/// Two-player game (mu, V) over finite alphabets. Immutable after validation.
class Game {
 public:
  int num_x() const { return static_cast<int>(x_alphabet_.size()); }
  int num_y() const { return static_cast<int>(y_alphabet_.size()); }
  int num_a() const { return static_cast<int>(a_alphabet_.size()); }
  int num_b() const { return static_cast<int>(b_alphabet_.size()); }
  int answer_pairs() const { return num_a() * num_b(); }

  double mu(int x, int y) const { return mu_(x, y); }
  const Eigen::MatrixXd& mu() const { return mu_; }
  bool wins(int x, int y, int a, int b) const {
    return predicate_[static_cast<std::size_t>(((x * num_y() + y) * num_a() + a) * num_b() + b)] != 0;
  }

  const std::vector<Label>& x_alphabet() const { return x_alphabet_; }
  const std::vector<Label>& y_alphabet() const { return y_alphabet_; }
  const std::vector<Label>& a_alphabet() const { return a_alphabet_; }
  const std::vector<Label>& b_alphabet() const { return b_alphabet_; }

  RawGame to_raw() const;

 private:
  friend Game validate_game(const RawGame& raw);
  std::vector<Label> x_alphabet_, y_alphabet_, a_alphabet_, b_alphabet_;
  Eigen::MatrixXd mu_;
  std::vector<std::uint8_t> predicate_;
};

/// Checks dimensions, signs and normalization; rescales mu when its sum is
/// within 1e-9 of one.
Game validate_game(const RawGame& raw);

/// Game with integer labels 0..k-1, mu and predicate given by callables.
template <typename Mu, typename Pred>
Game make_game(int nx, int ny, int na, int nb, Mu&& mu, Pred&& pred) {
  RawGame raw;
  auto labels = [](int k) {
    std::vector<Label> out;
    for (int i = 0; i < k; ++i) out.emplace_back(std::int64_t{i});
    return out;
  };
  raw.x_alphabet = labels(nx);
  raw.y_alphabet = labels(ny);
  raw.a_alphabet = labels(na);
  raw.b_alphabet = labels(nb);
  raw.mu.assign(static_cast<std::size_t>(nx), std::vector<double>(static_cast<std::size_t>(ny)));
  raw.predicate.assign(static_cast<std::size_t>(nx),
                       std::vector<std::vector<std::vector<int>>>(
                           static_cast<std::size_t>(ny),
                           std::vector<std::vector<int>>(static_cast<std::size_t>(na),
                                                         std::vector<int>(static_cast<std::size_t>(nb)))));
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      raw.mu[x][y] = mu(x, y);
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) raw.predicate[x][y][a][b] = pred(x, y, a, b) ? 1 : 0;
    }
  return validate_game(raw);
}

/// CHSH: binary alphabets, uniform questions, win iff a xor b == x and y.
Game chsh_game();

inline constexpr double kDefaultEnumerationBudget = 1e8;

/// Exact classical value: maximum over deterministic strategy pairs.
/// Throws BudgetExceeded when |A|^|X| * |B|^|Y| exceeds `budget`.
double classical_value(const Game& g, double budget = kDefaultEnumerationBudget);

/// Win probability of the deterministic strategy a = f(x), b = h(y).
double deterministic_value(const Game& g, std::span<const int> f, std::span<const int> h);

/// G^n with threshold fraction 1 - gamma.
struct ThresholdGameSpec {
  Game base;
  int n = 1;
  double threshold = 1.0;
};

/// Requires n >= 1 and 0 < threshold <= 1.
ThresholdGameSpec make_threshold_spec(Game base, int n, double threshold);

/// Smallest win count meeting `threshold` over `rounds` rounds:
/// ceil(threshold * rounds - 1e-12), floored at zero.
int required_wins(double threshold, int rounds);

/// True iff at least threshold * n coordinates satisfy the base predicate.
bool threshold_predicate(const ThresholdGameSpec& spec, std::span<const int> xs,
                         std::span<const int> ys, std::span<const int> as, std::span<const int> bs);

}  // namespace nlg
