#include "nlg/extraction.hpp"

#include "nlg/correlated_sampling.hpp"
#include "nlg/error.hpp"
#include "nlg/lemma_audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlg {

namespace {

/// Conditionals of one (T, j) bundle under the conditional table, from the
/// dense marginal m(r, x_j, y_j, a_j, b_j).
struct Bundle {
  double weight = 0.0;
  int nr = 0, nx = 0, ny = 0, na = 0, nb = 0;
  JointTable m;
  std::vector<double> p_x;                   // P(x_j = x | W)
  std::vector<double> p_y;                   // P(y_j = y | W)
  std::vector<std::vector<double>> r_given_x;  // [x][r]
  std::vector<std::vector<double>> r_given_y;  // [y][r]
  std::vector<Eigen::MatrixXd> a_given;      // [x]: (r, a) -> P(a_j = a | r, x_j = x, W)
  std::vector<Eigen::MatrixXd> b_given;      // [y]: (r, b) -> P(b_j = b | r, y_j = y, W)

  double at(int r, int x, int y, int a, int b) const {
    return m[((((static_cast<std::size_t>(r) * nx + x) * ny + y) * na + a) * nb) + b];
  }
};

Bundle make_bundle(const AugmentedTable& aug, const JointTable& cond, std::span<const int> t, int j, double weight) {
  const auto& tab = aug.table;
  auto order = bundle_variables(aug, t, j);
  for (char k : {'X', 'Y', 'A', 'B'}) order.push_back(tab.index_of(round_variable(k, j)));
  Bundle b;
  b.weight = weight;
  b.m = cond.marginal(std::span<const int>(order));
  const auto& sc = b.m.schema();
  const std::size_t nv = sc.size();
  b.nx = sc[nv - 4].cardinality;
  b.ny = sc[nv - 3].cardinality;
  b.na = sc[nv - 2].cardinality;
  b.nb = sc[nv - 1].cardinality;
  b.nr = static_cast<int>(b.m.size() / (static_cast<std::size_t>(b.nx) * b.ny * b.na * b.nb));

  b.p_x.assign(static_cast<std::size_t>(b.nx), 0.0);
  b.p_y.assign(static_cast<std::size_t>(b.ny), 0.0);
  b.r_given_x.assign(static_cast<std::size_t>(b.nx), std::vector<double>(static_cast<std::size_t>(b.nr), 0.0));
  b.r_given_y.assign(static_cast<std::size_t>(b.ny), std::vector<double>(static_cast<std::size_t>(b.nr), 0.0));
  b.a_given.assign(static_cast<std::size_t>(b.nx), Eigen::MatrixXd::Zero(b.nr, b.na));
  b.b_given.assign(static_cast<std::size_t>(b.ny), Eigen::MatrixXd::Zero(b.nr, b.nb));
  for (int r = 0; r < b.nr; ++r)
    for (int x = 0; x < b.nx; ++x)
      for (int y = 0; y < b.ny; ++y)
        for (int a = 0; a < b.na; ++a)
          for (int bb = 0; bb < b.nb; ++bb) {
            const double v = b.at(r, x, y, a, bb);
            b.p_x[static_cast<std::size_t>(x)] += v;
            b.p_y[static_cast<std::size_t>(y)] += v;
            b.r_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(r)] += v;
            b.r_given_y[static_cast<std::size_t>(y)][static_cast<std::size_t>(r)] += v;
            b.a_given[static_cast<std::size_t>(x)](r, a) += v;
            b.b_given[static_cast<std::size_t>(y)](r, bb) += v;
          }
  for (int x = 0; x < b.nx; ++x) {
    auto& rx = b.r_given_x[static_cast<std::size_t>(x)];
    for (int r = 0; r < b.nr; ++r) {
      const double prx = rx[static_cast<std::size_t>(r)];
      if (prx > 0.0) b.a_given[static_cast<std::size_t>(x)].row(r) /= prx;
    }
    if (b.p_x[static_cast<std::size_t>(x)] > 0.0)
      for (double& v : rx) v /= b.p_x[static_cast<std::size_t>(x)];
  }
  for (int y = 0; y < b.ny; ++y) {
    auto& ry = b.r_given_y[static_cast<std::size_t>(y)];
    for (int r = 0; r < b.nr; ++r) {
      const double pry = ry[static_cast<std::size_t>(r)];
      if (pry > 0.0) b.b_given[static_cast<std::size_t>(y)].row(r) /= pry;
    }
    if (b.p_y[static_cast<std::size_t>(y)] > 0.0)
      for (double& v : ry) v /= b.p_y[static_cast<std::size_t>(y)];
  }
  return b;
}

struct Setup {
  JointTable cond;
  double p_ws = 0.0;
  ErrorParams params;
  std::vector<Bundle> bundles;
  double target_win = 0.0;
};

Setup setup(const AugmentedTable& aug, const Game& g, double tau, double beta, double ent_bits) {
  if (aug.num_x != g.num_x() || aug.num_y != g.num_y()) throw ValidationError("dimension mismatch: table vs game");
  Setup s;
  auto [cond, p] = condition_on_event(aug.table, WinEventSpec::on_subset(aug.s, 1.0 - tau), g);
  s.cond = std::move(cond);
  s.p_ws = p;
  s.params = error_params_with_beta(beta, g.answer_pairs(), aug.rounds, static_cast<std::int64_t>(aug.s.size()), p,
                                    ent_bits);
  for (const auto& [t, wt] : t_distribution(aug, beta)) {
    std::vector<int> js;
    for (int j : free_rounds(aug))
      if (std::find(t.begin(), t.end(), j) == t.end()) js.push_back(j);
    for (int j : js) s.bundles.push_back(make_bundle(aug, s.cond, t, j, wt / static_cast<double>(js.size())));
  }
  for (const auto& b : s.bundles)
    for (int r = 0; r < b.nr; ++r)
      for (int x = 0; x < b.nx; ++x)
        for (int y = 0; y < b.ny; ++y)
          for (int a = 0; a < b.na; ++a)
            for (int bb = 0; bb < b.nb; ++bb)
              if (g.wins(x, y, a, bb)) s.target_win += b.weight * b.at(r, x, y, a, bb);
  return s;
}

bool usable(const Bundle& b, int x, int y) {
  if (b.p_x[static_cast<std::size_t>(x)] < 1e-12 || b.p_y[static_cast<std::size_t>(y)] < 1e-12) return false;
  return tv_distance(b.r_given_x[static_cast<std::size_t>(x)], b.r_given_y[static_cast<std::size_t>(y)]) <
         1.0 - 1e-12;
}

void note_skip(ExtractionReport& r, int x, int y, double mass) {
  r.skipped_mass += mass;
  const std::pair<int, int> xy{x, y};
  if (std::find(r.skipped_pairs.begin(), r.skipped_pairs.end(), xy) == r.skipped_pairs.end())
    r.skipped_pairs.push_back(xy);
}

}  // namespace

ExtractionReport extraction_protocol_exact(const AugmentedTable& aug, const Game& g, double tau, double beta,
                                           double ent_bits) {
  const Setup s = setup(aug, g, tau, beta, ent_bits);
  ExtractionReport out;
  out.behavior = Behavior(g.num_x(), g.num_y(), g.num_a(), g.num_b());
  out.p_ws = s.p_ws;
  out.params = s.params;
  out.target_win_probability = s.target_win;

  double diag = 0.0, off_diag = 0.0;
  for (const auto& b : s.bundles)
    for (int x = 0; x < b.nx; ++x)
      for (int y = 0; y < b.ny; ++y) {
        const double mu = g.mu(x, y);
        const double wmu = b.weight * mu;
        if (mu == 0.0 || !usable(b, x, y)) {
          if (mu > 0.0) note_skip(out, x, y, wmu);
          for (int r = 0; r < b.nr; ++r)
            for (int a = 0; a < b.na; ++a)
              for (int bb = 0; bb < b.nb; ++bb) diag += b.weight * b.at(r, x, y, a, bb);
          continue;
        }
        const Eigen::MatrixXd j =
            correlated_sampling_joint(b.r_given_x[static_cast<std::size_t>(x)], b.r_given_y[static_cast<std::size_t>(y)]);
        const Eigen::MatrixXd& pa = b.a_given[static_cast<std::size_t>(x)];
        const Eigen::MatrixXd& pb = b.b_given[static_cast<std::size_t>(y)];
        const Eigen::MatrixXd answers = pa.transpose() * j * pb;
        for (int a = 0; a < b.na; ++a)
          for (int bb = 0; bb < b.nb; ++bb) out.behavior(x, y, a, bb) += b.weight * answers(a, bb);
        const double agree = j.trace();
        out.agreement += wmu * agree;
        off_diag += wmu * (j.sum() - agree);
        for (int r = 0; r < b.nr; ++r)
          for (int a = 0; a < b.na; ++a)
            for (int bb = 0; bb < b.nb; ++bb)
              diag += std::abs(wmu * j(r, r) * pa(r, a) * pb(r, bb) - b.weight * b.at(r, x, y, a, bb));
      }
  out.tv_to_target = 0.5 * (diag + off_diag);
  out.win_probability = win_probability(out.behavior, g);
  return out;
}

ExtractionReport extraction_protocol_sampled(const AugmentedTable& aug, const Game& g, double tau, double beta,
                                             double ent_bits, std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  const Setup s = setup(aug, g, tau, beta, ent_bits);
  ExtractionReport out;
  out.behavior = Behavior(g.num_x(), g.num_y(), g.num_a(), g.num_b());
  out.p_ws = s.p_ws;
  out.params = s.params;
  out.target_win_probability = s.target_win;
  out.trials = trials;

  std::vector<double> mu_cdf, bundle_cdf;
  double acc = 0.0;
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) mu_cdf.push_back(acc += g.mu(x, y));
  acc = 0.0;
  for (const auto& b : s.bundles) bundle_cdf.push_back(acc += b.weight);
  auto pick = [](const auto& weights_cdf, double u) {
    const auto it = std::upper_bound(weights_cdf.begin(), weights_cdf.end(), u * weights_cdf.back());
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - weights_cdf.begin(),
                                                             static_cast<std::ptrdiff_t>(weights_cdf.size()) - 1));
  };
  auto pick_row = [](const Eigen::MatrixXd& m, int row, double u) {
    double c = 0.0;
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      c += m(row, k);
      if (u * m.row(row).sum() < c) return static_cast<int>(k);
    }
    return static_cast<int>(m.cols()) - 1;
  };

  std::vector<double> pair_counts(static_cast<std::size_t>(g.num_x() * g.num_y()), 0.0);
  std::int64_t wins = 0, agreements = 0, skipped = 0;
  for (std::int64_t k = 0; k < trials; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    const auto q = pick(mu_cdf, std::generate_canonical<double, 53>(rng));
    const int x = static_cast<int>(q) / g.num_y(), y = static_cast<int>(q) % g.num_y();
    const Bundle& b = s.bundles[pick(bundle_cdf, std::generate_canonical<double, 53>(rng))];
    if (!usable(b, x, y)) {
      ++skipped;
      note_skip(out, x, y, 0.0);
      continue;
    }
    SharedStream stream(rng(), 0);
    const auto cs = correlated_sample(b.r_given_x[static_cast<std::size_t>(x)],
                                      b.r_given_y[static_cast<std::size_t>(y)], stream);
    const int a = pick_row(b.a_given[static_cast<std::size_t>(x)], cs.p_sample, std::generate_canonical<double, 53>(rng));
    const int bb = pick_row(b.b_given[static_cast<std::size_t>(y)], cs.q_sample, std::generate_canonical<double, 53>(rng));
    out.behavior(x, y, a, bb) += 1.0;
    pair_counts[q] += 1.0;
    if (cs.p_sample == cs.q_sample) ++agreements;
    if (g.wins(x, y, a, bb)) ++wins;
  }
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y) {
      const double c = pair_counts[static_cast<std::size_t>(x * g.num_y() + y)];
      if (c > 0.0)
        for (int a = 0; a < g.num_a(); ++a)
          for (int bb = 0; bb < g.num_b(); ++bb) out.behavior(x, y, a, bb) /= c;
    }
  const double nt = static_cast<double>(trials);
  out.win_probability = static_cast<double>(wins) / nt;
  out.agreement = static_cast<double>(agreements) / nt;
  out.skipped_mass = static_cast<double>(skipped) / nt;
  return out;
}

}  // namespace nlg
