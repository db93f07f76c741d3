#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/measures.hpp"
#include "qcorr/qstate.hpp"

namespace qcorr {

/// Set of B parties; bit i stands for party i (i >= 1, party 0 is A).
using PartyMask = std::uint32_t;

PartyMask mask_of(const PartyList& parties);
PartyList parties_of(PartyMask mask);

/// Supplies Q_{A|S} for every non-empty set S of B parties.
class ComponentSource {
 public:
  virtual ~ComponentSource() = default;
  virtual int num_parties() const = 0;
  virtual MeasureValue component(PartyMask mask) const = 0;

  MeasureValue pair(int b) const { return component(PartyMask{1} << b); }
  /// Q_{A|B_1...B_{N-1}}.
  MeasureValue joint() const;
};

/// Components measured on a state, memoized per cut. Safe to share between
/// threads; a value computed twice is identical because seeds are fixed.
class StateComponents final : public ComponentSource {
 public:
  StateComponents(AnyState state, CorrelationMeasure measure, OptimizerConfig opt = {});

  int num_parties() const override;
  MeasureValue component(PartyMask mask) const override;

  const CorrelationMeasure& measure() const noexcept { return measure_; }
  const OptimizerConfig& optimizer() const noexcept { return opt_; }

 private:
  AnyState state_;
  CorrelationMeasure measure_;
  OptimizerConfig opt_;
  mutable std::mutex mutex_;
  mutable std::map<PartyMask, MeasureValue> cache_;
};

/// Synthetic exact component values. Asking for a missing set throws
/// InvalidParameter.
class TableComponents final : public ComponentSource {
 public:
  TableComponents(int num_parties, std::map<PartyMask, double> values);

  int num_parties() const override { return num_parties_; }
  MeasureValue component(PartyMask mask) const override;

 private:
  int num_parties_;
  std::map<PartyMask, double> values_;
};

enum class RelationSide { Polygamy, Monogamy };
enum class ResidualStrategy { Max, Mean };

std::string to_string(RelationSide side);

/// qAB^a + qAC^a - qABC^a. Throws DomainError on negative inputs or 0^0.
double residual_tripartite(double q_ab, double q_ac, double q_abc, double alpha);

/// Residuals of every subset reached by the recursion over `order`.
///
/// For an ordered set S of size j:
///   R(S) = s * (sum_{i in S} w_i Q_{AB_i}^e - Q_{A|S}^e) - sum_{k=2}^{j-1} level(S, k)
/// with s = +1 for polygamy (parts minus joint) and -1 for monogamy, and
/// level(S, k) the max (or mean) of R over the sets obtained by omitting one
/// of the first k+1 members of S.
struct ResidualTree {
  double exponent = 0.0;
  ResidualStrategy strategy = ResidualStrategy::Max;
  RelationSide side = RelationSide::Polygamy;
  PartyList order;
  std::vector<double> weights;  // weight of B_i at index i - 1
  std::map<PartyMask, double> terms;
  // Omitted party that achieved each level's max, levels k = 2 .. j-1.
  std::map<PartyMask, std::vector<int>> selection;
  // level(order, k) for k = 2 .. |order| - 1.
  std::vector<double> levels;
  double level_sum = 0.0;
  bool exact = true;
  bool degenerate = false;
};

/// `weights` empty means all ones; `order` empty means B_1 .. B_{N-1}.
ResidualTree residual_general(const ComponentSource& src, double exponent,
                              ResidualStrategy strategy, RelationSide side,
                              std::vector<double> weights = {}, PartyList order = {});

/// q_large^e + (2^{e/ref} - 1) q_small^e. Throws OrderingError when
/// q_large < q_small.
double lemma_weighted_pair(double q_large, double q_small, double exponent, double power_ref);

/// Weights (1, c, ..., c^{m-1}, c^{m+1}, ..., c^{m+1}, c^m) for B_1..B_{n_b}.
std::vector<double> ordering_weights(int n_b, int m, double c);

struct OrderingRow {
  int index = 0;        // i, comparing Q_{AB_i} with Q_{A|B_{i+1}...B_{N-1}}
  double pair = 0.0;
  double tail = 0.0;
  bool exact = true;
  bool ge = false;      // Q_{AB_i} >= tail holds (ties count)
  bool le = false;      // Q_{AB_i} <= tail holds (ties count)
  bool indeterminate = false;
};

struct OrderingResult {
  std::optional<int> m;
  // m lies in [1, N-3], the range the weighted theorems are stated for.
  bool in_theorem_range = false;
  std::vector<OrderingRow> rows;
};

/// Smallest m in [0, N-2] with Q_{AB_i} >= tail_i for i <= m and
/// Q_{AB_j} <= tail_j for m < j <= N-2. Estimate-backed comparisons within
/// `estimate_margin` count as ties.
OrderingResult ordering_classify(const ComponentSource& src, double estimate_margin);

struct BoundEntry {
  double value = 0.0;
  bool exact = true;
  bool degenerate = false;
  bool in_range = true;
};

BoundEntry polygamy_bound_base(const ComponentSource& src, double alpha, double beta);
BoundEntry lemma1_bound(const ComponentSource& src, double alpha, double beta);
BoundEntry thm1_bound(const ComponentSource& src, double alpha, double beta);
BoundEntry thm2_bound(const ComponentSource& src, double alpha, double beta);
BoundEntry cor1_bound(const ComponentSource& src, double alpha, double beta);
BoundEntry thm3_bound(const ComponentSource& src, double alpha, double beta, int m);
BoundEntry thm4_bound(const ComponentSource& src, double alpha, double beta, int m);

BoundEntry eq16_bound(const ComponentSource& src, double y, double x);
BoundEntry eq17_bound(const ComponentSource& src, double y, double x);
BoundEntry lemma2_bound(const ComponentSource& src, double y, double x);
BoundEntry eq18_bound(const ComponentSource& src, double y, double x, int m);
BoundEntry thm5_bound(const ComponentSource& src, double y, double x, int m);

enum class Verdict { Satisfied, Violated, Indeterminate, Degenerate };

std::string to_string(Verdict v);

struct BoundReport {
  double exponent = 0.0;
  RelationSide side = RelationSide::Polygamy;
  MeasureValue lhs;
  double lhs_power = 0.0;
  bool lhs_degenerate = false;
  std::map<std::string, BoundEntry> bounds;
  std::map<std::string, Verdict> satisfied;
  // Orderings between bounds: "thm2_le_base", "thm5_ge_eq18".
  std::map<std::string, Verdict> checks;
  std::optional<int> m;
  bool m_in_theorem_range = false;

  bool degenerate() const;
};

/// Side a bound id belongs to; throws InvalidParameter for unknown ids.
RelationSide side_of(const std::string& bound_id);

/// Every bound applicable to an N-party state on the given side.
std::vector<std::string> default_bound_ids(RelationSide side, int num_parties);

/// Comparison margin: 1e-9 for exact values, 10 tol + 1e-9 for estimates.
double comparison_margin(bool exact, double estimate_tol);

/// Evaluates the requested bounds at one exponent. Ordering-dependent
/// bounds are omitted when no valid m exists. `ordering` is computed when
/// not supplied and needed.
BoundReport evaluate_bounds(const ComponentSource& src, const CorrelationMeasure& measure,
                            RelationSide side, double exponent,
                            const std::vector<std::string>& ids, double estimate_tol,
                            const std::optional<OrderingResult>& ordering = std::nullopt);

/// evaluate_bounds over a grid; rows keep the grid order.
std::vector<BoundReport> verify_hierarchy(const ComponentSource& src,
                                          const CorrelationMeasure& measure, RelationSide side,
                                          const std::vector<double>& grid,
                                          const std::vector<std::string>& ids,
                                          double estimate_tol);

}  // namespace qcorr
