#include "nlg/joint_table.hpp"

#include "nlg/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

namespace nlg {

double table_budget() {
  if (const char* env = std::getenv("NLG_TABLE_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return kDefaultTableBudget;
}

namespace {

std::vector<std::size_t> strides_for(const std::vector<Variable>& schema) {
  std::vector<std::size_t> s(schema.size());
  std::size_t acc = 1;
  for (std::size_t i = schema.size(); i-- > 0;) {
    s[i] = acc;
    acc *= static_cast<std::size_t>(schema[i].cardinality);
  }
  return s;
}

std::size_t table_size(const std::vector<Variable>& schema) {
  double size = 1.0;
  for (const auto& v : schema) {
    if (v.cardinality < 1) throw ValidationError("variable " + v.name + " has empty alphabet");
    size *= v.cardinality;
  }
  if (size > table_budget())
    throw BudgetExceeded("joint table of " + std::to_string(static_cast<long long>(size)) +
                         " entries exceeds the table budget");
  return static_cast<std::size_t>(size);
}

}  // namespace

JointTable JointTable::make_unnormalized(std::vector<Variable> schema, std::vector<double> weights) {
  std::set<std::string> names;
  for (const auto& v : schema)
    if (!names.insert(v.name).second) throw ValidationError("duplicate variable " + v.name);
  if (weights.size() != table_size(schema)) throw ValidationError("dimension mismatch: table weights vs schema");
  for (double& w : weights) {
    if (!(w >= -1e-15)) throw ValidationError("negative probability in table");
    w = std::max(w, 0.0);
  }
  JointTable t;
  t.schema_ = std::move(schema);
  t.strides_ = strides_for(t.schema_);
  t.weights_ = std::move(weights);
  return t;
}

JointTable JointTable::make(std::vector<Variable> schema, std::vector<double> weights) {
  JointTable t = make_unnormalized(std::move(schema), std::move(weights));
  if (std::abs(t.total() - 1.0) > 1e-10) throw ValidationError("table not normalized");
  return t;
}

double JointTable::total() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

int JointTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name == name) return static_cast<int>(i);
  throw ValidationError("unknown variable " + std::string(name));
}

bool JointTable::has(std::string_view name) const {
  return std::any_of(schema_.begin(), schema_.end(), [&](const Variable& v) { return v.name == name; });
}

std::vector<int> JointTable::indices_of(std::span<const std::string> names) const {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(index_of(n));
  return out;
}

void JointTable::decode(std::size_t flat, std::span<int> out) const {
  for (std::size_t i = 0; i < schema_.size(); ++i)
    out[i] = static_cast<int>((flat / strides_[i]) % static_cast<std::size_t>(schema_[i].cardinality));
}

std::size_t JointTable::encode(std::span<const int> assignment) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < schema_.size(); ++i) flat += static_cast<std::size_t>(assignment[i]) * strides_[i];
  return flat;
}

JointTable JointTable::marginal(std::span<const int> vars) const {
  std::vector<Variable> schema;
  std::set<int> seen;
  for (int v : vars) {
    if (v < 0 || v >= static_cast<int>(schema_.size())) throw ValidationError("variable index out of range");
    if (!seen.insert(v).second) throw ValidationError("duplicate variable in marginal");
    schema.push_back(schema_[static_cast<std::size_t>(v)]);
  }
  const auto out_strides = strides_for(schema);
  std::vector<double> w(table_size(schema), 0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    std::size_t k = 0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const auto v = static_cast<std::size_t>(vars[j]);
      k += ((i / strides_[v]) % static_cast<std::size_t>(schema_[v].cardinality)) * out_strides[j];
    }
    w[k] += weights_[i];
  }
  return make_unnormalized(std::move(schema), std::move(w));
}

JointTable JointTable::marginal(std::span<const std::string> names) const {
  const auto idx = indices_of(names);
  return marginal(std::span<const int>(idx));
}

JointTable JointTable::renormalized(std::vector<double> w, double p) const {
  if (p < 1e-12) throw ValidationError("conditioning on null event");
  for (double& x : w) x /= p;
  JointTable t;
  t.schema_ = schema_;
  t.strides_ = strides_;
  t.weights_ = std::move(w);
  return t;
}

double total_variation(const JointTable& p, const JointTable& q) {
  if (p.size() != q.size() || p.num_variables() != q.num_variables())
    throw ValidationError("dimension mismatch: tables have different schemas");
  for (std::size_t i = 0; i < p.num_variables(); ++i)
    if (p.schema()[i].cardinality != q.schema()[i].cardinality)
      throw ValidationError("dimension mismatch: tables have different schemas");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double entropy(const JointTable& t, std::span<const int> vars) {
  std::vector<int> unique;
  for (int v : vars)
    if (std::find(unique.begin(), unique.end(), v) == unique.end()) unique.push_back(v);
  const JointTable m = t.marginal(std::span<const int>(unique));
  double h = 0.0;
  for (double p : m.weights())
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double conditional_mutual_information(const JointTable& t, std::span<const int> x, std::span<const int> y,
                                      std::span<const int> z) {
  auto join = [](std::span<const int> a, std::span<const int> b) {
    std::vector<int> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
  };
  const auto xz = join(x, z), yz = join(y, z), xyz = join(x, yz);
  return entropy(t, xz) + entropy(t, yz) - entropy(t, xyz) - entropy(t, z);
}

double expected_conditional_tv(const JointTable& t, std::span<const int> z, std::span<const int> c,
                               std::span<const int> d) {
  std::vector<int> order(c.begin(), c.end());
  order.insert(order.end(), d.begin(), d.end());
  order.insert(order.end(), z.begin(), z.end());
  const JointTable m = t.marginal(std::span<const int>(order));
  std::size_t nc = 1, nd = 1, nz = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto card = static_cast<std::size_t>(m.schema()[i].cardinality);
    (i < c.size() ? nc : i < c.size() + d.size() ? nd : nz) *= card;
  }
  const auto at = [&](std::size_t ci, std::size_t di, std::size_t zi) { return m[(ci * nd + di) * nz + zi]; };
  double sum = 0.0;
  std::vector<double> p_cz(nz);
  for (std::size_t ci = 0; ci < nc; ++ci) {
    double p_c = 0.0;
    std::fill(p_cz.begin(), p_cz.end(), 0.0);
    for (std::size_t di = 0; di < nd; ++di)
      for (std::size_t zi = 0; zi < nz; ++zi) {
        p_cz[zi] += at(ci, di, zi);
        p_c += at(ci, di, zi);
      }
    if (p_c <= 0.0) continue;
    for (std::size_t di = 0; di < nd; ++di) {
      double p_cd = 0.0;
      for (std::size_t zi = 0; zi < nz; ++zi) p_cd += at(ci, di, zi);
      if (p_cd <= 0.0) continue;
      for (std::size_t zi = 0; zi < nz; ++zi) sum += std::abs(at(ci, di, zi) - p_cd * p_cz[zi] / p_c);
    }
  }
  return 0.5 * sum;
}

}  // namespace nlg
