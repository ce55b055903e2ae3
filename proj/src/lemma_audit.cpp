#include "nlg/lemma_audit.hpp"

#include "nlg/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace nlg {

std::vector<int> free_rounds(const AugmentedTable& aug) {
  std::vector<int> out;
  for (int i = 0; i < aug.rounds; ++i)
    if (!std::binary_search(aug.s.begin(), aug.s.end(), i)) out.push_back(i);
  return out;
}

std::vector<int> bundle_variables(const AugmentedTable& aug, std::span<const int> t, int j) {
  const auto& tab = aug.table;
  std::vector<int> out;
  for (int i = 0; i < aug.rounds; ++i)
    if (i != j) out.push_back(tab.index_of(round_variable('O', i)));
  for (int i : aug.s) {
    out.push_back(tab.index_of(round_variable('X', i)));
    out.push_back(tab.index_of(round_variable('Y', i)));
  }
  for (int i : t) out.push_back(tab.index_of(round_variable('X', i)));
  for (int i : aug.s) out.push_back(tab.index_of(round_variable('A', i)));
  for (int i : t) out.push_back(tab.index_of(round_variable('A', i)));
  for (int i : aug.s) out.push_back(tab.index_of(round_variable('B', i)));
  return out;
}

namespace {

void combinations(const std::vector<int>& pool, std::size_t k, std::size_t start, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    combinations(pool, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::pair<std::vector<int>, double>> t_distribution(const AugmentedTable& aug, double beta) {
  const auto pool = free_rounds(aug);
  const int m = static_cast<int>(pool.size());
  if (m < 1) throw ValidationError("no rounds outside S");
  const int k_max = std::min(static_cast<int>(std::floor(beta * m)), m - 1);
  std::vector<std::pair<std::vector<int>, double>> out;
  for (int k = 0; k <= k_max; ++k) {
    std::vector<std::vector<int>> sets;
    std::vector<int> cur;
    combinations(pool, static_cast<std::size_t>(k), 0, cur, sets);
    for (auto& s : sets) out.emplace_back(std::move(s), 1.0 / ((k_max + 1) * static_cast<double>(sets.size())));
  }
  return out;
}

bool LemmaAuditReport::all_satisfied() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.satisfied; });
}

namespace {

using Key = std::uint64_t;

/// Mixed-radix key of the values of `vars` in a full assignment.
Key key_of(std::span<const int> assignment, std::span<const int> vars, std::span<const int> cards) {
  Key k = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    k = k * static_cast<Key>(cards[i]) + static_cast<Key>(assignment[static_cast<std::size_t>(vars[i])]);
  return k;
}

std::vector<int> cards_of(const JointTable& t, std::span<const int> vars) {
  std::vector<int> out;
  for (int v : vars) out.push_back(t.schema()[static_cast<std::size_t>(v)].cardinality);
  return out;
}

/// Second path: group the nonzero entries of the full table by hash and
/// compare the joint P(z, c, d) with P(c, d) P(z | c).
double grouped_conditional_tv(const JointTable& t, std::span<const int> z, std::span<const int> c,
                              std::span<const int> d) {
  const auto zc = cards_of(t, z), cc = cards_of(t, c), dc = cards_of(t, d);
  Key nz = 1, nd = 1;
  for (int v : zc) nz *= static_cast<Key>(v);
  for (int v : dc) nd *= static_cast<Key>(v);
  std::unordered_map<Key, double> p_zcd, p_cd, p_zc, p_c;
  std::unordered_map<Key, std::vector<Key>> z_support;
  std::vector<int> a(t.num_variables());
  for (std::size_t f = 0; f < t.size(); ++f) {
    if (t[f] == 0.0) continue;
    t.decode(f, a);
    const Key kc = key_of(a, c, cc), kd = key_of(a, d, dc), kz = key_of(a, z, zc);
    p_zcd[(kc * nd + kd) * nz + kz] += t[f];
    p_cd[kc * nd + kd] += t[f];
    auto [it, inserted] = p_zc.try_emplace(kc * nz + kz, 0.0);
    it->second += t[f];
    if (inserted) z_support[kc].push_back(kz);
    p_c[kc] += t[f];
  }
  double sum = 0.0;
  for (const auto& [kcd, pcd] : p_cd) {
    const Key kc = kcd / nd;
    const double pc = p_c.at(kc);
    for (Key kz : z_support.at(kc)) {
      const auto it = p_zcd.find(kcd * nz + kz);
      const double joint = it == p_zcd.end() ? 0.0 : it->second;
      sum += std::abs(joint - pcd * p_zc.at(kc * nz + kz) / pc);
    }
  }
  return 0.5 * sum;
}

double grouped_marginal_tv(const JointTable& p, const JointTable& q, std::span<const int> vars) {
  const auto cards = cards_of(p, vars);
  std::unordered_map<Key, double> mp, mq;
  std::vector<int> a(p.num_variables());
  for (std::size_t f = 0; f < p.size(); ++f) {
    if (p[f] != 0.0) {
      p.decode(f, a);
      mp[key_of(a, vars, cards)] += p[f];
    }
    if (q[f] != 0.0) {
      q.decode(f, a);
      mq[key_of(a, vars, cards)] += q[f];
    }
  }
  double sum = 0.0;
  for (const auto& [k, v] : mp) {
    const auto it = mq.find(k);
    sum += std::abs(v - (it == mq.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : mq)
    if (!mp.count(k)) sum += v;
  return 0.5 * sum;
}

struct LemmaValues {
  // input, samp_x, samp_y, bob, alice
  double path1[5] = {0, 0, 0, 0, 0};
  double path2[5] = {0, 0, 0, 0, 0};
};

std::vector<int> cat(std::vector<int> a, std::initializer_list<int> b) {
  a.insert(a.end(), b);
  return a;
}

/// Lemma left-hand sides for a fixed T, averaged over j outside T u S.
LemmaValues values_for(const AugmentedTable& aug, const JointTable& cond, std::span<const int> t) {
  LemmaValues out;
  const auto& tab = aug.table;
  std::vector<int> js;
  for (int j : free_rounds(aug))
    if (std::find(t.begin(), t.end(), j) == t.end()) js.push_back(j);
  if (js.empty()) throw ValidationError("T leaves no round j outside T u S");

  for (int j : js) {
    const int xj = tab.index_of(round_variable('X', j)), yj = tab.index_of(round_variable('Y', j)),
              aj = tab.index_of(round_variable('A', j)), bj = tab.index_of(round_variable('B', j));
    const auto r = bundle_variables(aug, t, j);

    // First path: dense marginal on (R, X_j, Y_j, A_j, B_j), then dense sums.
    const auto order = cat(r, {xj, yj, aj, bj});
    const JointTable m = cond.marginal(std::span<const int>(order));
    const int nr = static_cast<int>(r.size());
    std::vector<int> rl(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i) rl[static_cast<std::size_t>(i)] = i;
    const int lx = nr, ly = nr + 1, la = nr + 2, lb = nr + 3;
    const std::vector<int> xy_local{lx, ly};
    const std::vector<int> xy_global{xj, yj};
    const JointTable cond_xy = m.marginal(std::span<const int>(xy_local));
    const JointTable base_xy = tab.marginal(std::span<const int>(xy_global));
    out.path1[0] += total_variation(cond_xy, base_xy);
    const std::vector<int> vx{lx}, vy{ly}, vxa{lx, la};
    out.path1[1] += expected_conditional_tv(m, rl, vx, vy);
    out.path1[2] += expected_conditional_tv(m, rl, vy, vx);
    const std::vector<int> vb{lb}, va{la};
    out.path1[3] += expected_conditional_tv(m, vb, cat(rl, {ly}), vxa);
    out.path1[4] += expected_conditional_tv(m, va, cat(rl, {lx}), vy);

    // Second path: hashed group-by directly over the full conditional table.
    const std::vector<int> gx{xj}, gy{yj}, gxa{xj, aj}, gb{bj}, ga{aj};
    out.path2[0] += grouped_marginal_tv(cond, tab, xy_global);
    out.path2[1] += grouped_conditional_tv(cond, r, gx, gy);
    out.path2[2] += grouped_conditional_tv(cond, r, gy, gx);
    out.path2[3] += grouped_conditional_tv(cond, gb, cat(r, {yj}), gxa);
    out.path2[4] += grouped_conditional_tv(cond, ga, cat(r, {xj}), gy);
  }
  for (int k = 0; k < 5; ++k) {
    out.path1[k] /= static_cast<double>(js.size());
    out.path2[k] /= static_cast<double>(js.size());
  }
  return out;
}

}  // namespace

LemmaAuditReport lemma_audit(const AugmentedTable& aug, const Game& g, double tau, double beta, std::vector<int> t,
                             double ent_bits) {
  std::sort(t.begin(), t.end());
  if (std::adjacent_find(t.begin(), t.end()) != t.end()) throw ValidationError("T has repeated rounds");
  for (int i : t)
    if (i < 0 || i >= aug.rounds || std::binary_search(aug.s.begin(), aug.s.end(), i))
      throw ValidationError("T must be a subset of the rounds outside S");
  const int m = aug.rounds - static_cast<int>(aug.s.size());
  if (static_cast<double>(t.size()) > beta * m) throw ValidationError("|T| exceeds beta m");
  if (static_cast<int>(t.size()) >= m) throw ValidationError("T leaves no round j outside T u S");

  const auto [cond, p_ws] = condition_on_event(aug.table, WinEventSpec::on_subset(aug.s, 1.0 - tau), g);

  LemmaAuditReport r;
  r.s = aug.s;
  r.t = t;
  r.tau = tau;
  r.beta = beta;
  r.ent_bits = ent_bits;
  r.p_ws = p_ws;
  r.params = error_params_with_beta(beta, g.answer_pairs(), aug.rounds, static_cast<std::int64_t>(aug.s.size()),
                                    p_ws, ent_bits);

  const LemmaValues fixed = values_for(aug, cond, t);
  LemmaValues averaged;
  for (const auto& [set, w] : t_distribution(aug, beta)) {
    const LemmaValues v = values_for(aug, cond, set);
    for (int k = 0; k < 5; ++k) {
      averaged.path1[k] += w * v.path1[k];
      averaged.path2[k] += w * v.path2[k];
    }
  }

  static const char* names[5] = {"input_distribution", "correlated_sampleability_x", "correlated_sampleability_y",
                                 "bob_answer_independence", "alice_answer_independence"};
  const double bounds[5] = {std::sqrt(r.params.delta), std::sqrt(r.params.delta_prime),
                            std::sqrt(r.params.delta_prime), std::sqrt(2.0 * r.params.delta_dblprime),
                            std::sqrt(2.0 * r.params.delta_prime)};
  for (const auto& [conv, values] : {std::pair<const char*, const LemmaValues*>{"fixed_t", &fixed},
                                     std::pair<const char*, const LemmaValues*>{"averaged_t", &averaged}})
    for (int k = 0; k < 5; ++k) {
      LemmaCheck c;
      c.lemma = names[k];
      c.convention = conv;
      c.lhs = values->path1[k];
      c.lhs_check = values->path2[k];
      c.bound = bounds[k];
      c.vacuous = c.bound >= 1.0;
      c.satisfied = std::isfinite(c.lhs) && c.lhs <= c.bound + 1e-12;
      r.max_path_discrepancy = std::max(r.max_path_discrepancy, std::abs(c.lhs - c.lhs_check));
      r.checks.push_back(std::move(c));
    }
  return r;
}

}  // namespace nlg
