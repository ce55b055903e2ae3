#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlg {

struct Variable {
  std::string name;
  int cardinality = 0;
};

inline constexpr double kDefaultTableBudget = 5e7;

/// Entry budget for dense tables: NLG_TABLE_BUDGET if set, else the default.
double table_budget();

/// Dense joint distribution over named finite variables. The first variable
/// is the most significant digit of the flat index.
class JointTable {
 public:
  JointTable() = default;
  /// Validates weights >= -1e-15 and sum within 1e-10 of one.
  static JointTable make(std::vector<Variable> schema, std::vector<double> weights);
  /// Same, without the normalization check (used for sub-probability tables).
  static JointTable make_unnormalized(std::vector<Variable> schema, std::vector<double> weights);

  const std::vector<Variable>& schema() const { return schema_; }
  std::size_t num_variables() const { return schema_.size(); }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double operator[](std::size_t flat) const { return weights_[flat]; }
  double total() const;

  /// Index of the variable called `name`; throws ValidationError if absent.
  int index_of(std::string_view name) const;
  bool has(std::string_view name) const;
  std::vector<int> indices_of(std::span<const std::string> names) const;

  void decode(std::size_t flat, std::span<int> out) const;
  std::size_t encode(std::span<const int> assignment) const;

  /// Marginal on `vars` (schema indices), in the given order. Duplicates are rejected.
  JointTable marginal(std::span<const int> vars) const;
  JointTable marginal(std::span<const std::string> names) const;

  /// Probability of the event; `pred` receives the full assignment.
  template <typename Pred>
  double probability(Pred&& pred) const {
    std::vector<int> a(schema_.size());
    double p = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] == 0.0) continue;
      decode(i, a);
      if (pred(std::span<const int>(a))) p += weights_[i];
    }
    return p;
  }

  /// Table conditioned on the event, and the event's probability. Throws
  /// ValidationError "conditioning on null event" below 1e-12.
  template <typename Pred>
  std::pair<JointTable, double> condition(Pred&& pred) const {
    std::vector<int> a(schema_.size());
    std::vector<double> w(weights_.size(), 0.0);
    double p = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] == 0.0) continue;
      decode(i, a);
      if (pred(std::span<const int>(a))) {
        w[i] = weights_[i];
        p += weights_[i];
      }
    }
    return {renormalized(std::move(w), p), p};
  }

 private:
  JointTable renormalized(std::vector<double> w, double p) const;
  std::vector<Variable> schema_;
  std::vector<std::size_t> strides_;
  std::vector<double> weights_;
};

/// Half the l1 distance between two tables with identical schemas.
double total_variation(const JointTable& p, const JointTable& q);

/// Shannon entropy in bits of the marginal on `vars` (duplicates ignored).
double entropy(const JointTable& t, std::span<const int> vars);

/// I(X;Y|Z) in bits; the variable sets may overlap.
double conditional_mutual_information(const JointTable& t, std::span<const int> x, std::span<const int> y,
                                      std::span<const int> z);

/// E_{c,d} || P_{Z|c,d} - P_{Z|c} ||, the expected total variation caused by
/// dropping `d` from the conditioning. Terms with P(c) = 0 are skipped.
double expected_conditional_tv(const JointTable& t, std::span<const int> z, std::span<const int> c,
                               std::span<const int> d);

}  // namespace nlg
