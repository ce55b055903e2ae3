#include "nlg/repetition.hpp"

#include "nlg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <bit>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace nlg {

double iid_threshold_win_prob(double p, int n, double threshold) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("win probability must lie in [0, 1]");
  if (n < 1) throw ValidationError("n must be >= 1");
  const int k0 = required_wins(threshold, n);
  if (k0 > n) return 0.0;
  if (k0 <= 0) return 1.0;
  if (p == 1.0) return 1.0;
  if (p == 0.0) return 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  // Sum of binomial terms k in [lo, hi], accumulated in log space.
  auto mass = [&](int lo, int hi) {
    std::vector<double> logs;
    for (int k = lo; k <= hi; ++k)
      logs.push_back(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq);
    const double top = *std::max_element(logs.begin(), logs.end());
    double s = 0.0;
    for (double l : logs) s += std::exp(l - top);
    return std::exp(top + std::log(s));
  };
  // Sum the smaller side so tails near one keep their absolute accuracy.
  if (k0 > n * p) return std::min(1.0, mass(k0, n));
  return std::clamp(1.0 - mass(0, k0 - 1), 0.0, 1.0);
}

double hoeffding_completeness_bound(double nu, double eta, int n) {
  if (eta < 0.0 || eta > nu) throw ValidationError("completeness bound requires 0 <= eta <= nu");
  if (n < 1) throw ValidationError("n must be >= 1");
  return 1.0 - std::exp(-(nu - eta) * (nu - eta) * n / 3.0);
}

ThresholdEstimate wilson_estimate(std::int64_t passes, std::int64_t trials) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  constexpr double z = 1.959963984540054;
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(passes) / nt;
  const double denom = 1.0 + z * z / nt;
  const double center = (p + z * z / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z * z / (4.0 * nt * nt)) / denom;
  return {trials, passes, p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

int sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

ThresholdEstimate monte_carlo_threshold(const Behavior& p, const ThresholdGameSpec& spec, std::int64_t trials,
                                        std::uint64_t seed) {
  const Game& g = spec.base;
  if (p.num_x() != g.num_x() || p.num_y() != g.num_y() || p.num_a() != g.num_a() || p.num_b() != g.num_b())
    throw ValidationError("dimension mismatch: behavior vs game alphabets");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  validate_behavior(p);

  std::vector<double> question_cdf;
  double acc = 0.0;
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) question_cdf.push_back(acc += g.mu(x, y));
  std::vector<std::vector<double>> answer_cdf;
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) {
      std::vector<double> cdf;
      double c = 0.0;
      for (int a = 0; a < g.num_a(); ++a)
        for (int b = 0; b < g.num_b(); ++b) cdf.push_back(c += std::max(0.0, p(x, y, a, b)));
      answer_cdf.push_back(std::move(cdf));
    }

  const int need = required_wins(spec.threshold, spec.n);
  std::int64_t passes = 0;
  for (std::int64_t k = 0; k < trials; ++k) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(k));
    int wins = 0;
    for (int i = 0; i < spec.n; ++i) {
      const int q = sample_cdf(question_cdf, std::generate_canonical<double, 53>(rng));
      const int ans = sample_cdf(answer_cdf[static_cast<std::size_t>(q)], std::generate_canonical<double, 53>(rng));
      const int x = q / g.num_y(), y = q % g.num_y(), a = ans / g.num_b(), b = ans % g.num_b();
      wins += g.wins(x, y, a, b) ? 1 : 0;
    }
    if (wins >= need) ++passes;
  }
  return wilson_estimate(passes, trials);
}

ThresholdEstimate monte_carlo_threshold(const QuantumStrategy& s, const ThresholdGameSpec& spec,
                                        std::int64_t trials, std::uint64_t seed) {
  return monte_carlo_threshold(behavior_of(s, spec.base), spec, trials, seed);
}

int encode_vector(std::span<const int> digits, int base) {
  int idx = 0;
  for (int d : digits) idx = idx * base + d;
  return idx;
}

std::vector<int> decode_vector(int index, int base, int rounds) {
  std::vector<int> out(static_cast<std::size_t>(rounds));
  for (int i = rounds - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = index % base;
    index /= base;
  }
  return out;
}

namespace {

int int_pow(int base, int e) {
  double r = std::pow(static_cast<double>(base), e);
  if (r > std::numeric_limits<int>::max()) throw BudgetExceeded("vector alphabet too large");
  return static_cast<int>(r);
}

}  // namespace

Behavior iid_lift(const Behavior& p, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  const int nx = int_pow(p.num_x(), n), ny = int_pow(p.num_y(), n), na = int_pow(p.num_a(), n),
            nb = int_pow(p.num_b(), n);
  if (static_cast<double>(nx) * ny * na * nb > table_budget())
    throw BudgetExceeded("i.i.d. lift exceeds the table budget");
  Behavior out(nx, ny, na, nb);
  for (int x = 0; x < nx; ++x) {
    const auto xs = decode_vector(x, p.num_x(), n);
    for (int y = 0; y < ny; ++y) {
      const auto ys = decode_vector(y, p.num_y(), n);
      for (int a = 0; a < na; ++a) {
        const auto as = decode_vector(a, p.num_a(), n);
        for (int b = 0; b < nb; ++b) {
          const auto bs = decode_vector(b, p.num_b(), n);
          double v = 1.0;
          for (std::size_t i = 0; i < static_cast<std::size_t>(n) && v != 0.0; ++i) v *= p(xs[i], ys[i], as[i], bs[i]);
          out(x, y, a, b) = v;
        }
      }
    }
  }
  return out;
}

std::string round_variable(char kind, int round) { return std::string(1, kind) + std::to_string(round); }

JointTable enumerate_joint(const Behavior& p, const Game& g, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  const double entries = std::pow(static_cast<double>(g.num_x()) * g.num_y() * g.num_a() * g.num_b(), n);
  if (entries > table_budget()) throw BudgetExceeded("joint table exceeds the table budget");
  const int nx = int_pow(g.num_x(), n), ny = int_pow(g.num_y(), n), na = int_pow(g.num_a(), n),
            nb = int_pow(g.num_b(), n);
  if (p.num_x() != nx || p.num_y() != ny || p.num_a() != na || p.num_b() != nb)
    throw ValidationError("dimension mismatch: behavior alphabets vs game^n");

  std::vector<Variable> schema;
  for (char kind : {'X', 'Y', 'A', 'B'}) {
    const int card = kind == 'X' ? g.num_x() : kind == 'Y' ? g.num_y() : kind == 'A' ? g.num_a() : g.num_b();
    for (int i = 0; i < n; ++i) schema.push_back({round_variable(kind, i), card});
  }
  // Round-major vector encoding coincides with the table's digit order, so the
  // flat index is the behavior's own index.
  std::vector<double> w(static_cast<std::size_t>(nx) * ny * na * nb);
  for (int x = 0; x < nx; ++x) {
    const auto xs = decode_vector(x, g.num_x(), n);
    for (int y = 0; y < ny; ++y) {
      const auto ys = decode_vector(y, g.num_y(), n);
      double q = 1.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) q *= g.mu(xs[i], ys[i]);
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
          w[((static_cast<std::size_t>(x) * ny + y) * na + a) * nb + b] = q * std::max(0.0, p(x, y, a, b));
    }
  }
  return JointTable::make(std::move(schema), std::move(w));
}

JointTable enumerate_iid(const Behavior& single_round, const Game& g, int n) {
  return enumerate_joint(iid_lift(single_round, n), g, n);
}

std::vector<int> AugmentedTable::omega_variables() const {
  std::vector<int> out;
  for (int i = 0; i < rounds; ++i) out.push_back(table.index_of(round_variable('O', i)));
  for (int i : s) {
    out.push_back(table.index_of(round_variable('X', i)));
    out.push_back(table.index_of(round_variable('Y', i)));
  }
  return out;
}

int count_rounds(const JointTable& t) {
  int n = 0;
  while (t.has(round_variable('X', n))) ++n;
  return n;
}

AugmentedTable augment_dependency_breaking(const JointTable& table, int rounds, int num_x, int num_y,
                                          std::vector<int> s) {
  if (rounds < 1 || count_rounds(table) != rounds) throw ValidationError("table does not have the stated rounds");
  for (int i : s)
    if (i < 0 || i >= rounds) throw ValidationError("S out of range");
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());

  std::vector<int> xi, yi;
  for (int i = 0; i < rounds; ++i) {
    xi.push_back(table.index_of(round_variable('X', i)));
    yi.push_back(table.index_of(round_variable('Y', i)));
    if (table.schema()[static_cast<std::size_t>(xi.back())].cardinality != num_x ||
        table.schema()[static_cast<std::size_t>(yi.back())].cardinality != num_y)
      throw ValidationError("dimension mismatch: question alphabets");
  }
  const int card = num_x + num_y;
  std::vector<Variable> schema;
  for (int i = 0; i < rounds; ++i) schema.push_back({round_variable('O', i), card});
  schema.insert(schema.end(), table.schema().begin(), table.schema().end());
  const double omega_count = std::pow(static_cast<double>(card), rounds);
  if (omega_count * static_cast<double>(table.size()) > table_budget())
    throw BudgetExceeded("augmented table exceeds the table budget");

  const auto old_size = table.size();
  std::vector<double> w(static_cast<std::size_t>(omega_count) * old_size, 0.0);
  std::vector<int> a(table.num_variables());
  const double coin_weight = std::ldexp(1.0, -rounds);
  for (std::size_t f = 0; f < old_size; ++f) {
    if (table[f] == 0.0) continue;
    table.decode(f, a);
    for (unsigned mask = 0; mask < (1u << rounds); ++mask) {
      std::size_t omega = 0;
      for (int i = 0; i < rounds; ++i) {
        const bool bob = (mask >> i) & 1u;
        const int digit = bob ? num_x + a[static_cast<std::size_t>(yi[static_cast<std::size_t>(i)])]
                              : a[static_cast<std::size_t>(xi[static_cast<std::size_t>(i)])];
        omega = omega * static_cast<std::size_t>(card) + static_cast<std::size_t>(digit);
      }
      w[omega * old_size + f] += table[f] * coin_weight;
    }
  }
  return {JointTable::make(std::move(schema), std::move(w)), rounds, num_x, num_y, std::move(s)};
}

double dependency_breaking_defect(const AugmentedTable& t) {
  const int n = t.rounds;
  std::vector<int> order;
  for (int i = 0; i < n; ++i) order.push_back(t.table.index_of(round_variable('O', i)));
  for (int i = 0; i < n; ++i) order.push_back(t.table.index_of(round_variable('X', i)));
  for (int i = 0; i < n; ++i) order.push_back(t.table.index_of(round_variable('Y', i)));
  const JointTable m = t.table.marginal(std::span<const int>(order));
  const auto nx = static_cast<std::size_t>(std::pow(t.num_x, n)), ny = static_cast<std::size_t>(std::pow(t.num_y, n));

  std::map<std::vector<int>, std::vector<double>> blocks;
  std::vector<int> a(m.num_variables());
  for (std::size_t f = 0; f < m.size(); ++f) {
    if (m[f] == 0.0) continue;
    m.decode(f, a);
    std::vector<int> key(a.begin(), a.begin() + n);
    for (int i : t.s) {
      key.push_back(a[static_cast<std::size_t>(n + i)]);
      key.push_back(a[static_cast<std::size_t>(2 * n + i)]);
    }
    auto& block = blocks[key];
    if (block.empty()) block.assign(nx * ny, 0.0);
    const auto x = static_cast<std::size_t>(encode_vector(std::span<const int>(a).subspan(static_cast<std::size_t>(n), static_cast<std::size_t>(n)), t.num_x));
    const auto y = static_cast<std::size_t>(encode_vector(std::span<const int>(a).subspan(static_cast<std::size_t>(2 * n), static_cast<std::size_t>(n)), t.num_y));
    block[x * ny + y] += m[f];
  }

  double worst = 0.0;
  for (const auto& [key, block] : blocks) {
    double total = 0.0;
    std::vector<double> px(nx, 0.0), py(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        px[x] += block[x * ny + y];
        py[y] += block[x * ny + y];
        total += block[x * ny + y];
      }
    if (total <= 0.0) continue;
    double tv = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) tv += std::abs(block[x * ny + y] / total - px[x] * py[y] / (total * total));
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

WinEventSpec WinEventSpec::round_win(int j) { return {Kind::round, j, 1.0, {}}; }
WinEventSpec WinEventSpec::global(double threshold) { return {Kind::global_threshold, 0, threshold, {}}; }
WinEventSpec WinEventSpec::on_subset(std::vector<int> s, double threshold) {
  return {Kind::subset_threshold, 0, threshold, std::move(s)};
}

bool WinEventSpec::holds(std::span<const char> wins) const {
  switch (kind) {
    case Kind::round:
      return wins[static_cast<std::size_t>(round)] != 0;
    case Kind::global_threshold: {
      const auto count = std::count(wins.begin(), wins.end(), char{1});
      return count >= required_wins(threshold, static_cast<int>(wins.size()));
    }
    case Kind::subset_threshold: {
      int count = 0;
      for (int i : subset) count += wins[static_cast<std::size_t>(i)] != 0 ? 1 : 0;
      return count >= required_wins(threshold, static_cast<int>(subset.size()));
    }
  }
  return false;
}

RoundWinEvaluator::RoundWinEvaluator(const JointTable& t, const Game& g, int rounds) : g_(&g), rounds_(rounds) {
  for (int i = 0; i < rounds; ++i) {
    x_.push_back(t.index_of(round_variable('X', i)));
    y_.push_back(t.index_of(round_variable('Y', i)));
    a_.push_back(t.index_of(round_variable('A', i)));
    b_.push_back(t.index_of(round_variable('B', i)));
  }
}

void RoundWinEvaluator::operator()(std::span<const int> v, std::span<char> wins) const {
  for (std::size_t i = 0; i < static_cast<std::size_t>(rounds_); ++i)
    wins[i] = g_->wins(v[static_cast<std::size_t>(x_[i])], v[static_cast<std::size_t>(y_[i])],
                       v[static_cast<std::size_t>(a_[i])], v[static_cast<std::size_t>(b_[i])])
                  ? 1
                  : 0;
}

namespace {

void check_event(const WinEventSpec& e, int rounds) {
  if (e.kind == WinEventSpec::Kind::round && (e.round < 0 || e.round >= rounds))
    throw ValidationError("event round out of range");
  for (int i : e.subset)
    if (i < 0 || i >= rounds) throw ValidationError("event subset out of range");
  if (!(e.threshold >= 0.0 && e.threshold <= 1.0)) throw ValidationError("event threshold must lie in [0, 1]");
}

/// Nonzero entries of a table with their round-win bitmasks.
struct WinMasks {
  std::vector<double> weight;
  std::vector<std::uint32_t> mask;
};

WinMasks win_masks(const JointTable& t, const Game& g, int rounds) {
  if (rounds > 32) throw ValidationError("too many rounds");
  RoundWinEvaluator eval(t, g, rounds);
  WinMasks out;
  std::vector<int> a(t.num_variables());
  std::vector<char> wins(static_cast<std::size_t>(rounds));
  for (std::size_t f = 0; f < t.size(); ++f) {
    if (t[f] == 0.0) continue;
    t.decode(f, a);
    eval(a, wins);
    std::uint32_t m = 0;
    for (int i = 0; i < rounds; ++i) m |= static_cast<std::uint32_t>(wins[static_cast<std::size_t>(i)]) << i;
    out.weight.push_back(t[f]);
    out.mask.push_back(m);
  }
  return out;
}

int count_subset(std::uint32_t mask, const std::vector<int>& s) {
  int c = 0;
  for (int i : s) c += static_cast<int>((mask >> i) & 1u);
  return c;
}

}  // namespace

std::pair<JointTable, double> condition_on_event(const JointTable& t, const WinEventSpec& event, const Game& g) {
  const int n = count_rounds(t);
  check_event(event, n);
  RoundWinEvaluator eval(t, g, n);
  std::vector<char> wins(static_cast<std::size_t>(n));
  return t.condition([&](std::span<const int> a) {
    eval(a, wins);
    return event.holds(wins);
  });
}

double event_probability(const JointTable& t, const WinEventSpec& event, const Game& g) {
  const int n = count_rounds(t);
  check_event(event, n);
  RoundWinEvaluator eval(t, g, n);
  std::vector<char> wins(static_cast<std::size_t>(n));
  return t.probability([&](std::span<const int> a) {
    eval(a, wins);
    return event.holds(wins);
  });
}

namespace {

Prop32Result evaluate_masks(const WinMasks& wm, int n, double gamma, double tau, std::vector<int> s) {
  std::sort(s.begin(), s.end());
  Prop32Result r;
  r.s = s;
  const int need_s = required_wins(1.0 - tau, static_cast<int>(s.size()));
  const int need_global = required_wins(1.0 - gamma, n);
  std::vector<double> joint(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < wm.weight.size(); ++k) {
    if (std::popcount(wm.mask[k]) >= need_global) r.p_global += wm.weight[k];
    if (count_subset(wm.mask[k], s) < need_s) continue;
    r.p_ws += wm.weight[k];
    for (int j = 0; j < n; ++j)
      if ((wm.mask[k] >> j) & 1u) joint[static_cast<std::size_t>(j)] += wm.weight[k];
  }
  if (r.p_ws < 1e-12) {
    r.conditional_win = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  std::set<int> members(s.begin(), s.end());
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < n; ++j) {
    if (members.count(j)) continue;
    sum += joint[static_cast<std::size_t>(j)] / r.p_ws;
    ++count;
  }
  r.conditional_win = sum / count;
  return r;
}

void check_prop32(int n, double gamma, double tau, std::size_t t) {
  if (static_cast<int>(t) >= n) throw ValidationError("subset size must be < n");
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(tau >= 0.0 && tau <= 1.0))
    throw ValidationError("gamma and tau must lie in [0, 1]");
}

}  // namespace

Prop32Result prop32_evaluate(const JointTable& t, const Game& g, double gamma, double tau, std::vector<int> s) {
  const int n = count_rounds(t);
  check_prop32(n, gamma, tau, std::set<int>(s.begin(), s.end()).size());
  for (int i : s)
    if (i < 0 || i >= n) throw ValidationError("S out of range");
  Prop32Result r = evaluate_masks(win_masks(t, g, n), n, gamma, tau, std::move(s));
  r.candidates_evaluated = 1;
  r.null_candidates = std::isnan(r.conditional_win) ? 1 : 0;
  return r;
}

Prop32Result prop32_search(const JointTable& t, const Game& g, double gamma, double tau, int subset_size,
                           int samples, std::uint64_t seed) {
  const int n = count_rounds(t);
  if (subset_size < 0) throw ValidationError("subset size must be >= 0");
  check_prop32(n, gamma, tau, static_cast<std::size_t>(subset_size));
  if (samples < 1) throw ValidationError("samples must be >= 1");
  const WinMasks wm = win_masks(t, g, n);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> pick(0, n - 1);

  std::optional<Prop32Result> best;
  int nulls = 0;
  for (int k = 0; k < samples; ++k) {
    std::vector<int> s(static_cast<std::size_t>(subset_size));
    for (int& i : s) i = pick(rng);
    Prop32Result r = evaluate_masks(wm, n, gamma, tau, std::move(s));
    if (std::isnan(r.conditional_win)) {
      ++nulls;
      continue;
    }
    if (!best || r.conditional_win > best->conditional_win) best = std::move(r);
  }
  if (!best) throw ValidationError("all candidate events null");
  best->candidates_evaluated = samples;
  best->null_candidates = nulls;
  return *best;
}

}  // namespace nlg
